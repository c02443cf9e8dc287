#pragma once

#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace rubric_reward {

struct DecodeParams {
  std::optional<double> temperature;
  std::optional<int> max_tokens;
  bool operator==(const DecodeParams&) const = default;
};

/// Text-only generation request. `caller_spans` marks byte ranges of `user`
/// copied verbatim from caller-supplied task text (question, response).
struct GenerationRequest {
  std::string request_id;
  std::string system;
  std::string user;
  std::string response_schema;
  DecodeParams decode;
  std::vector<std::pair<std::size_t, std::size_t>> caller_spans;

  std::string serialized() const;
};

struct GenerationReply {
  std::string text;
  std::string finish_reason = "stop";
};

/// Request/response contract for an external text-generation service.
/// Implementations must be safe to call concurrently.
class GenerationTransport {
 public:
  virtual ~GenerationTransport() = default;
  virtual GenerationReply generate(const GenerationRequest& request) = 0;
};

/// Stable 16-hex-digit FNV-1a key over system and user text.
std::string request_key(const GenerationRequest& request);

/// Serves pre-recorded replies keyed by request_key. Record-per-line file:
///   {"key": "...", "replies": [{"text": "...", "finish_reason": "stop"},
///                              {"error": "timeout"}]}
/// ("text"/"error" at top level is shorthand for a single reply). A record
/// may carry "request_id" instead of "key"; it matches when no hash key
/// does, which keeps hand-written files usable. Replies for a key are
/// served in order; the last one repeats.
class ReplayTransport : public GenerationTransport {
 public:
  struct Entry {
    std::optional<GenerationReply> reply;
    std::string error;
  };

  ReplayTransport() = default;
  ReplayTransport(ReplayTransport&& other) noexcept : entries_(std::move(other.entries_)) {}
  static ReplayTransport from_file(const std::filesystem::path& path);

  void add(const std::string& key, Entry entry);
  GenerationReply generate(const GenerationRequest& request) override;

  /// Appends a record for `request` to a replay file.
  static void append_record(const std::filesystem::path& path,
                            const GenerationRequest& request,
                            const std::vector<Entry>& entries);

 private:
  std::mutex mu_;
  std::map<std::string, std::deque<Entry>> entries_;
};

/// Adapts a callable; convenient for tests and host-language bindings.
class FunctionTransport : public GenerationTransport {
 public:
  using Fn = std::function<GenerationReply(const GenerationRequest&)>;
  explicit FunctionTransport(Fn fn) : fn_(std::move(fn)) {}
  GenerationReply generate(const GenerationRequest& request) override { return fn_(request); }

 private:
  Fn fn_;
};

struct HttpTransportConfig {
  std::string endpoint;  // e.g. http://host:8000/v1/chat/completions
  std::string api_key;
  std::string model;
  double timeout_seconds = 120.0;

  /// Reads JUDGE_ENDPOINT, JUDGE_API_KEY and JUDGE_MODEL.
  static HttpTransportConfig from_env();
};

/// Chat-completions style client: POSTs {"model", "messages": [system, user]}
/// and reads choices[0].message.content.
class HttpTransport : public GenerationTransport {
 public:
  explicit HttpTransport(HttpTransportConfig config);
  GenerationReply generate(const GenerationRequest& request) override;

  const HttpTransportConfig& config() const { return config_; }

 private:
  HttpTransportConfig config_;
  std::string base_;
  std::string path_;
};

}  // namespace rubric_reward
