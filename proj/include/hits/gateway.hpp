#pragma once

#include <condition_variable>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <variant>
#include <vector>

#include "hits/prompting.hpp"

namespace hits {

struct SamplingParams {
  double temperature = 0.0;
  double top_p = 1.0;
  int max_output_tokens = 2048;
  bool greedy = true;  // attempt 1 of the escalation schedule
};

struct Transcript {
  std::string key;  // content hash of (messages, params, model)
  std::string model;
  std::string request_json;  // canonical message list
  std::string response;
  std::string timestamp;
};

struct GatewayError {
  enum class Kind { Transport, ReplayMiss, Provider, FormatExhausted };
  Kind kind;
  std::string message;
  std::vector<std::string> attempts;  // raw responses, FormatExhausted only
};

std::string canonical_request_json(const std::vector<Message>& messages,
                                   const SamplingParams& params,
                                   const std::string& model);

/// SHA-256 over the canonical request encoding; byte-identical requests
/// and only those share a key.
std::string transcript_key(const std::vector<Message>& messages,
                           const SamplingParams& params,
                           const std::string& model);

/// Line-delimited JSON transcript store. Lookups are exact by key;
/// appends are serialized.
class TranscriptStore {
 public:
  TranscriptStore() = default;
  TranscriptStore(TranscriptStore&& other) noexcept
      : entries_(std::move(other.entries_)),
        sink_(std::move(other.sink_)),
        stable_timestamps_(other.stable_timestamps_) {}
  TranscriptStore& operator=(TranscriptStore&& other) noexcept {
    entries_ = std::move(other.entries_);
    sink_ = std::move(other.sink_);
    stable_timestamps_ = other.stable_timestamps_;
    return *this;
  }

  /// Load every *.jsonl file under `path` (or `path` itself if a file).
  static TranscriptStore open(const std::filesystem::path& path);

  void attach_sink(const std::filesystem::path& file, bool stable_timestamps);
  void append(const Transcript& t);
  const Transcript* find(const std::string& key) const;
  size_t size() const { return entries_.size(); }

 private:
  std::map<std::string, Transcript> entries_;
  std::filesystem::path sink_;
  bool stable_timestamps_ = false;
  std::mutex mutex_;
};

class Backend {
 public:
  virtual ~Backend() = default;
  virtual std::variant<std::string, GatewayError> complete(
      const std::vector<Message>& messages, const SamplingParams& params) = 0;
};

/// HTTP transport signature: (url_path, body_json) -> raw body or error.
using Transport = std::function<std::variant<std::string, GatewayError>(
    const std::string&, const std::string&)>;

/// OpenAI-style chat-completions client. A custom transport may be
/// injected for tests; the default speaks HTTPS to SLICEGEN_API_BASE with
/// the bearer token from SLICEGEN_API_KEY. At most `max_in_flight`
/// requests run concurrently.
class LiveBackend : public Backend {
 public:
  LiveBackend(std::string model, Transport transport = nullptr,
              int max_in_flight = 2);
  std::variant<std::string, GatewayError> complete(
      const std::vector<Message>& messages,
      const SamplingParams& params) override;

 private:
  std::string model_;
  Transport transport_;
  int max_in_flight_;
  std::mutex gate_;
  std::condition_variable cv_;
  int in_flight_ = 0;
};

/// Serves from the store when possible; otherwise delegates to the inner
/// backend and persists the response.
class RecordBackend : public Backend {
 public:
  RecordBackend(Backend& inner, TranscriptStore& store, std::string model);
  std::variant<std::string, GatewayError> complete(
      const std::vector<Message>& messages,
      const SamplingParams& params) override;

 private:
  Backend& inner_;
  TranscriptStore& store_;
  std::string model_;
};

/// Fixture-only backend: holds no transport, performs no network
/// operations; a missing key is an error.
class ReplayBackend : public Backend {
 public:
  ReplayBackend(const TranscriptStore& store, std::string model);
  std::variant<std::string, GatewayError> complete(
      const std::vector<Message>& messages,
      const SamplingParams& params) override;

 private:
  const TranscriptStore& store_;
  std::string model_;
};

struct EscalationResult {
  std::string text;
  int attempts = 0;
  SamplingParams params;  // the attempt that succeeded
};

/// Attempt schedule per prompt: greedy, then top-p 0.2, 0.5, 0.8.
std::vector<SamplingParams> escalation_schedule(int max_output_tokens = 2048);

/// Returns the first response accepted by `validator`; after the four
/// scheduled attempts all fail, a FormatExhausted error carrying every raw
/// attempt.
std::variant<EscalationResult, GatewayError> complete_with_escalation(
    Backend& backend, const PromptBundle& bundle,
    const std::function<bool(const std::string&)>& validator,
    int max_output_tokens = 2048);

}  // namespace hits
