#include "hits/gateway.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

namespace hits {

using nlohmann::json;

namespace {

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    unsigned char b = digest[i];
    out.push_back(hex[b >> 4]);
    out.push_back(hex[b & 0xf]);
  }
  return out;
}

json params_json(const SamplingParams& p) {
  return json{{"temperature", p.temperature},
              {"top_p", p.top_p},
              {"max_output_tokens", p.max_output_tokens},
              {"greedy", p.greedy}};
}

std::string now_iso8601() {
  auto t = std::chrono::system_clock::to_time_t(
      std::chrono::system_clock::now());
  char buf[32];
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::string canonical_request_json(const std::vector<Message>& messages,
                                   const SamplingParams& params,
                                   const std::string& model) {
  json msgs = json::array();
  for (const auto& m : messages)
    msgs.push_back({{"role", m.role == Role::System ? "system" : "user"},
                    {"content", m.text}});
  json req{{"model", model},
           {"messages", msgs},
           {"params", params_json(params)}};
  return req.dump();
}

std::string transcript_key(const std::vector<Message>& messages,
                           const SamplingParams& params,
                           const std::string& model) {
  return sha256_hex(canonical_request_json(messages, params, model));
}

TranscriptStore TranscriptStore::open(const std::filesystem::path& path) {
  TranscriptStore store;
  std::vector<std::filesystem::path> files;
  if (std::filesystem::is_directory(path)) {
    for (const auto& e : std::filesystem::recursive_directory_iterator(path))
      if (e.is_regular_file() && e.path().extension() == ".jsonl")
        files.push_back(e.path());
    std::sort(files.begin(), files.end());
  } else if (std::filesystem::exists(path)) {
    files.push_back(path);
  }
  for (const auto& f : files) {
    std::ifstream in(f);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      json j = json::parse(line, nullptr, false);
      if (j.is_discarded()) continue;
      Transcript t;
      t.key = j.value("key", "");
      t.model = j.value("model", "");
      t.request_json = j.contains("request") ? j["request"].dump() : "";
      t.response = j.value("response", "");
      t.timestamp = j.value("ts", "");
      if (!t.key.empty()) store.entries_[t.key] = std::move(t);
    }
  }
  return store;
}

void TranscriptStore::attach_sink(const std::filesystem::path& file,
                                  bool stable_timestamps) {
  sink_ = file;
  stable_timestamps_ = stable_timestamps;
}

void TranscriptStore::append(const Transcript& t) {
  std::lock_guard lock(mutex_);
  Transcript stored = t;
  if (stored.timestamp.empty())
    stored.timestamp =
        stable_timestamps_ ? "1970-01-01T00:00:00Z" : now_iso8601();
  entries_[stored.key] = stored;
  if (sink_.empty()) return;
  std::ofstream out(sink_, std::ios::app);
  json j{{"key", stored.key},
         {"model", stored.model},
         {"request", json::parse(stored.request_json, nullptr, false)},
         {"response", stored.response},
         {"ts", stored.timestamp}};
  out << j.dump() << "\n";
}

const Transcript* TranscriptStore::find(const std::string& key) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : &it->second;
}

LiveBackend::LiveBackend(std::string model, Transport transport,
                         int max_in_flight)
    : model_(std::move(model)),
      transport_(std::move(transport)),
      max_in_flight_(max_in_flight) {
  if (!transport_) {
    transport_ = [](const std::string& path, const std::string& body)
        -> std::variant<std::string, GatewayError> {
      const char* base = std::getenv("SLICEGEN_API_BASE");
      const char* key = std::getenv("SLICEGEN_API_KEY");
      if (!key)
        return GatewayError{GatewayError::Kind::Transport,
                            "SLICEGEN_API_KEY is not set"};
      std::string origin = base ? base : "https://api.openai.com";
      httplib::Client client(origin);
      client.set_read_timeout(120, 0);
      httplib::Headers headers{
          {"Authorization", std::string("Bearer ") + key}};
      auto res = client.Post(path, headers, body, "application/json");
      if (!res)
        return GatewayError{GatewayError::Kind::Transport,
                            "transport failure: " +
                                httplib::to_string(res.error())};
      if (res->status / 100 != 2)
        return GatewayError{GatewayError::Kind::Provider,
                            "provider returned " +
                                std::to_string(res->status) + ": " +
                                res->body};
      return res->body;
    };
  }
}

std::variant<std::string, GatewayError> LiveBackend::complete(
    const std::vector<Message>& messages, const SamplingParams& params) {
  {
    std::unique_lock lock(gate_);
    cv_.wait(lock, [&] { return in_flight_ < max_in_flight_; });
    ++in_flight_;
  }
  json msgs = json::array();
  for (const auto& m : messages)
    msgs.push_back({{"role", m.role == Role::System ? "system" : "user"},
                    {"content", m.text}});
  json body{{"model", model_},
            {"messages", msgs},
            {"temperature", params.temperature},
            {"top_p", params.top_p},
            {"max_tokens", params.max_output_tokens}};
  auto raw = transport_("/v1/chat/completions", body.dump());
  {
    std::lock_guard lock(gate_);
    --in_flight_;
  }
  cv_.notify_one();
  if (auto* err = std::get_if<GatewayError>(&raw)) return *err;

  json j = json::parse(std::get<std::string>(raw), nullptr, false);
  if (j.is_discarded())
    return GatewayError{GatewayError::Kind::Provider,
                        "provider response is not JSON"};
  if (!j.contains("choices") || j["choices"].empty() ||
      !j["choices"][0].contains("message"))
    return GatewayError{GatewayError::Kind::Provider,
                        "provider error payload: " + j.dump()};
  return j["choices"][0]["message"].value("content", "");
}

RecordBackend::RecordBackend(Backend& inner, TranscriptStore& store,
                             std::string model)
    : inner_(inner), store_(store), model_(std::move(model)) {}

std::variant<std::string, GatewayError> RecordBackend::complete(
    const std::vector<Message>& messages, const SamplingParams& params) {
  std::string key = transcript_key(messages, params, model_);
  if (const Transcript* hit = store_.find(key)) return hit->response;
  auto result = inner_.complete(messages, params);
  if (auto* err = std::get_if<GatewayError>(&result)) return *err;
  Transcript t;
  t.key = key;
  t.model = model_;
  t.request_json = canonical_request_json(messages, params, model_);
  t.response = std::get<std::string>(result);
  store_.append(t);
  return result;
}

ReplayBackend::ReplayBackend(const TranscriptStore& store, std::string model)
    : store_(store), model_(std::move(model)) {}

std::variant<std::string, GatewayError> ReplayBackend::complete(
    const std::vector<Message>& messages, const SamplingParams& params) {
  std::string key = transcript_key(messages, params, model_);
  if (const Transcript* hit = store_.find(key)) return hit->response;
  return GatewayError{GatewayError::Kind::ReplayMiss,
                      "no transcript for key " + key.substr(0, 12) + "..."};
}

std::vector<SamplingParams> escalation_schedule(int max_output_tokens) {
  std::vector<SamplingParams> schedule;
  SamplingParams greedy;
  greedy.greedy = true;
  greedy.temperature = 0.0;
  greedy.top_p = 1.0;
  greedy.max_output_tokens = max_output_tokens;
  schedule.push_back(greedy);
  for (double top_p : {0.2, 0.5, 0.8}) {
    SamplingParams p;
    p.greedy = false;
    p.temperature = 0.0;
    p.top_p = top_p;
    p.max_output_tokens = max_output_tokens;
    schedule.push_back(p);
  }
  return schedule;
}

std::variant<EscalationResult, GatewayError> complete_with_escalation(
    Backend& backend, const PromptBundle& bundle,
    const std::function<bool(const std::string&)>& validator,
    int max_output_tokens) {
  std::vector<std::string> attempts;
  auto schedule = escalation_schedule(max_output_tokens);
  for (size_t i = 0; i < schedule.size(); ++i) {
    auto result = backend.complete(bundle.messages, schedule[i]);
    if (auto* err = std::get_if<GatewayError>(&result)) return *err;
    std::string text = std::get<std::string>(result);
    if (validator(text))
      return EscalationResult{std::move(text), (int)i + 1, schedule[i]};
    attempts.push_back(std::move(text));
  }
  return GatewayError{GatewayError::Kind::FormatExhausted,
                      "all " + std::to_string(schedule.size()) +
                          " attempts violated the required format",
                      std::move(attempts)};
}

}  // namespace hits
