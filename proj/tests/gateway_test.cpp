#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "hits/gateway.hpp"

using namespace hits;
namespace fs = std::filesystem;

namespace {

std::vector<Message> sample_messages() {
  return {{Role::System, "system text"}, {Role::User, "user text"}};
}

PromptBundle sample_bundle() {
  PromptBundle b;
  b.family = PromptFamily::Generate;
  b.expected_payload_kind = PayloadKind::TestFile;
  b.messages = sample_messages();
  return b;
}

/// Backend that replays a scripted list of responses and records the
/// sampling params of every call.
struct ScriptedBackend : Backend {
  std::vector<std::variant<std::string, GatewayError>> script;
  std::vector<SamplingParams> calls;
  size_t next = 0;

  std::variant<std::string, GatewayError> complete(
      const std::vector<Message>&, const SamplingParams& params) override {
    calls.push_back(params);
    if (next >= script.size())
      return GatewayError{GatewayError::Kind::Transport, "script exhausted", {}};
    return script[next++];
  }
};

}  // namespace

TEST_CASE("canonical_request_json is stable and key-relevant-complete") {
  auto msgs = sample_messages();
  SamplingParams p;
  std::string a = canonical_request_json(msgs, p, "model-a");
  std::string b = canonical_request_json(msgs, p, "model-a");
  CHECK(a == b);
  auto j = nlohmann::json::parse(a);
  CHECK(j["model"] == "model-a");
  CHECK(j["messages"].size() == 2);
  CHECK(j["messages"][0]["role"] == "system");
  CHECK(j["messages"][1]["content"] == "user text");
}

TEST_CASE("transcript_key: byte-identical requests and only those share keys") {
  auto msgs = sample_messages();
  SamplingParams p;
  std::string base = transcript_key(msgs, p, "m");
  CHECK(base.size() == 64);  // sha-256 hex
  CHECK(base.find_first_not_of("0123456789abcdef") == std::string::npos);
  CHECK(transcript_key(msgs, p, "m") == base);

  auto msgs2 = msgs;
  msgs2[1].text += " ";
  CHECK(transcript_key(msgs2, p, "m") != base);

  SamplingParams p2 = p;
  p2.greedy = false;
  p2.top_p = 0.2;
  CHECK(transcript_key(msgs, p2, "m") != base);

  CHECK(transcript_key(msgs, p, "other-model") != base);
}

TEST_CASE("transcript store: append, find, jsonl round-trip") {
  fs::path dir = fs::temp_directory_path() / "hits_store_test";
  fs::remove_all(dir);
  fs::create_directories(dir);

  {
    TranscriptStore store;
    store.attach_sink(dir / "a.jsonl", /*stable_timestamps=*/true);
    store.append({"k1", "m", "{\"r\":1}", "response one\nwith newline", ""});
    store.append({"k2", "m", "{\"r\":2}", "response two", ""});
    CHECK(store.size() == 2);
    REQUIRE(store.find("k1") != nullptr);
    CHECK(store.find("k1")->response == "response one\nwith newline");
    CHECK(store.find("missing") == nullptr);
  }

  // Stable timestamps pin ts to the epoch.
  {
    std::ifstream in(dir / "a.jsonl");
    std::string line;
    int lines = 0;
    while (std::getline(in, line)) {
      ++lines;
      auto j = nlohmann::json::parse(line);
      CHECK(j["ts"] == "1970-01-01T00:00:00Z");
    }
    CHECK(lines == 2);
  }

  auto reopened = TranscriptStore::open(dir);
  CHECK(reopened.size() == 2);
  REQUIRE(reopened.find("k2") != nullptr);
  CHECK(reopened.find("k2")->request_json == "{\"r\":2}");

  auto single = TranscriptStore::open(dir / "a.jsonl");
  CHECK(single.size() == 2);
  fs::remove_all(dir);
}

TEST_CASE("replay backend: exact hits, miss is an error, no transport") {
  auto msgs = sample_messages();
  SamplingParams greedy = escalation_schedule().front();

  TranscriptStore store;
  store.append({transcript_key(msgs, greedy, "m"), "m",
                canonical_request_json(msgs, greedy, "m"), "stored reply", ""});

  ReplayBackend replay(store, "m");
  auto hit = replay.complete(msgs, greedy);
  REQUIRE(std::holds_alternative<std::string>(hit));
  CHECK(std::get<std::string>(hit) == "stored reply");

  SamplingParams other = greedy;
  other.greedy = false;
  other.top_p = 0.2;
  auto miss = replay.complete(msgs, other);
  REQUIRE(std::holds_alternative<GatewayError>(miss));
  CHECK(std::get<GatewayError>(miss).kind == GatewayError::Kind::ReplayMiss);
}

TEST_CASE("record backend: store hit short-circuits the network") {
  auto msgs = sample_messages();
  SamplingParams greedy = escalation_schedule().front();

  ScriptedBackend inner;
  inner.script = {std::string("live answer")};

  TranscriptStore store;
  RecordBackend record(inner, store, "m");

  auto first = record.complete(msgs, greedy);
  REQUIRE(std::holds_alternative<std::string>(first));
  CHECK(std::get<std::string>(first) == "live answer");
  CHECK(inner.calls.size() == 1);
  CHECK(store.size() == 1);

  // Second identical call: served from the store, no second request.
  auto second = record.complete(msgs, greedy);
  REQUIRE(std::holds_alternative<std::string>(second));
  CHECK(std::get<std::string>(second) == "live answer");
  CHECK(inner.calls.size() == 1);
}

TEST_CASE("escalation schedule is exactly greedy then top-p 0.2, 0.5, 0.8") {
  // Acceptance criterion: attempt parameters must match the documented
  // schedule exactly.
  auto sched = escalation_schedule(512);
  REQUIRE(sched.size() == 4);
  CHECK(sched[0].greedy);
  CHECK(sched[0].temperature == 0.0);
  for (const auto& p : sched) CHECK(p.max_output_tokens == 512);
  CHECK_FALSE(sched[1].greedy);
  CHECK(sched[1].top_p == doctest::Approx(0.2));
  CHECK(sched[2].top_p == doctest::Approx(0.5));
  CHECK(sched[3].top_p == doctest::Approx(0.8));
  // Monotone top-p over the retry attempts.
  CHECK(sched[1].top_p < sched[2].top_p);
  CHECK(sched[2].top_p < sched[3].top_p);
}

TEST_CASE("escalation: first accepted response wins, later attempts unused") {
  ScriptedBackend backend;
  backend.script = {std::string("bad"), std::string("good enough")};
  auto result = complete_with_escalation(
      backend, sample_bundle(),
      [](const std::string& s) { return s.rfind("good", 0) == 0; });
  REQUIRE(std::holds_alternative<EscalationResult>(result));
  const auto& ok = std::get<EscalationResult>(result);
  CHECK(ok.text == "good enough");
  CHECK(ok.attempts == 2);
  CHECK_FALSE(ok.params.greedy);
  CHECK(ok.params.top_p == doctest::Approx(0.2));
  CHECK(backend.calls.size() == 2);
}

TEST_CASE("escalation: four rejected attempts exhaust the format budget") {
  ScriptedBackend backend;
  backend.script = {std::string("r1"), std::string("r2"), std::string("r3"),
                    std::string("r4"), std::string("r5")};
  auto result = complete_with_escalation(backend, sample_bundle(),
                                         [](const std::string&) { return false; });
  REQUIRE(std::holds_alternative<GatewayError>(result));
  const auto& err = std::get<GatewayError>(result);
  CHECK(err.kind == GatewayError::Kind::FormatExhausted);
  REQUIRE(err.attempts.size() == 4);  // all raw responses preserved
  CHECK(err.attempts[0] == "r1");
  CHECK(err.attempts[3] == "r4");
  REQUIRE(backend.calls.size() == 4);  // never a fifth request
  CHECK(backend.calls[0].greedy);
  CHECK(backend.calls[1].top_p == doctest::Approx(0.2));
  CHECK(backend.calls[2].top_p == doctest::Approx(0.5));
  CHECK(backend.calls[3].top_p == doctest::Approx(0.8));
}

TEST_CASE("escalation: transport errors propagate immediately") {
  ScriptedBackend backend;
  backend.script = {GatewayError{GatewayError::Kind::Transport, "boom", {}}};
  auto result = complete_with_escalation(backend, sample_bundle(),
                                         [](const std::string&) { return true; });
  REQUIRE(std::holds_alternative<GatewayError>(result));
  CHECK(std::get<GatewayError>(result).kind == GatewayError::Kind::Transport);
  CHECK(backend.calls.size() == 1);
}

TEST_CASE("live backend: custom transport sees an openai-style body") {
  std::vector<std::string> bodies;
  Transport transport = [&](const std::string& path, const std::string& body)
      -> std::variant<std::string, GatewayError> {
    bodies.push_back(body);
    CHECK(path == "/v1/chat/completions");
    return std::string(
        "{\"choices\": [{\"message\": {\"content\": \"hello back\"}}]}");
  };
  LiveBackend live("test-model", transport);
  auto r = live.complete(sample_messages(), escalation_schedule().front());
  REQUIRE(std::holds_alternative<std::string>(r));
  CHECK(std::get<std::string>(r) == "hello back");

  REQUIRE(bodies.size() == 1);
  auto j = nlohmann::json::parse(bodies[0]);
  CHECK(j["model"] == "test-model");
  CHECK(j["temperature"] == 0.0);
  CHECK(j["messages"].size() == 2);
}

TEST_CASE("live backend: malformed provider reply is a provider error") {
  Transport transport = [](const std::string&, const std::string&)
      -> std::variant<std::string, GatewayError> {
    return std::string("{\"unexpected\": true}");
  };
  LiveBackend live("m", transport);
  auto r = live.complete(sample_messages(), escalation_schedule().front());
  REQUIRE(std::holds_alternative<GatewayError>(r));
  CHECK(std::get<GatewayError>(r).kind == GatewayError::Kind::Provider);
}
