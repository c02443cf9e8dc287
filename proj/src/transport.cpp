#include "rubric_reward/transport.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>

#include <httplib.h>
#include <json.hpp>

#include "rubric_reward/error.hpp"

namespace rubric_reward {

using nlohmann::json;

std::string GenerationRequest::serialized() const {
  return system + "\n\n" + user + "\n\n" + response_schema;
}

std::string request_key(const GenerationRequest& request) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&](std::string_view s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ULL;
    }
  };
  mix(request.system);
  mix(std::string_view("\x1f", 1));
  mix(request.user);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

// Records keyed by request id live next to hash keys under this prefix,
// which cannot collide with a 16-digit hex key.
const std::string kIdPrefix = "id:";

ReplayTransport::Entry entry_from_json(const json& j) {
  ReplayTransport::Entry e;
  if (j.contains("error")) {
    e.error = j.at("error").get<std::string>();
    return e;
  }
  GenerationReply reply;
  reply.text = j.at("text").get<std::string>();
  reply.finish_reason = j.value("finish_reason", "stop");
  e.reply = std::move(reply);
  return e;
}

}  // namespace

ReplayTransport ReplayTransport::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open replay file " + path.string());
  ReplayTransport t;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      json j = json::parse(line);
      std::string key = j.contains("request_id")
                            ? kIdPrefix + j.at("request_id").get<std::string>()
                            : j.at("key").get<std::string>();
      if (j.contains("replies")) {
        for (const auto& r : j.at("replies")) t.add(key, entry_from_json(r));
      } else {
        t.add(key, entry_from_json(j));
      }
    } catch (const json::exception& e) {
      throw Error(ErrorCode::MalformedDocument, path.string() + ":" +
                                                    std::to_string(lineno) + ": " + e.what());
    }
  }
  return t;
}

void ReplayTransport::add(const std::string& key, Entry entry) {
  std::lock_guard lock(mu_);
  entries_[key].push_back(std::move(entry));
}

GenerationReply ReplayTransport::generate(const GenerationRequest& request) {
  std::string key = request_key(request);
  Entry entry;
  {
    std::lock_guard lock(mu_);
    auto it = entries_.find(key);
    if (it == entries_.end()) it = entries_.find(kIdPrefix + request.request_id);
    if (it == entries_.end() || it->second.empty()) {
      throw Error(ErrorCode::TransportError,
                  "no recorded reply for request " + request.request_id + " (key " + key + ")");
    }
    entry = it->second.front();
    if (it->second.size() > 1) it->second.pop_front();
  }
  if (!entry.reply) {
    throw Error(ErrorCode::TransportError,
                "request " + request.request_id + ": " + entry.error);
  }
  return *entry.reply;
}

void ReplayTransport::append_record(const std::filesystem::path& path,
                                    const GenerationRequest& request,
                                    const std::vector<Entry>& entries) {
  json replies = json::array();
  for (const auto& e : entries) {
    if (e.reply) {
      replies.push_back({{"text", e.reply->text}, {"finish_reason", e.reply->finish_reason}});
    } else {
      replies.push_back({{"error", e.error}});
    }
  }
  std::ofstream out(path, std::ios::app);
  if (!out) throw Error(ErrorCode::IoError, "cannot write replay file " + path.string());
  out << json{{"key", request_key(request)}, {"replies", replies}}.dump() << "\n";
}

HttpTransportConfig HttpTransportConfig::from_env() {
  auto get = [](const char* name) {
    const char* v = std::getenv(name);
    return v ? std::string(v) : std::string();
  };
  HttpTransportConfig c;
  c.endpoint = get("JUDGE_ENDPOINT");
  c.api_key = get("JUDGE_API_KEY");
  c.model = get("JUDGE_MODEL");
  return c;
}

HttpTransport::HttpTransport(HttpTransportConfig config) : config_(std::move(config)) {
  const std::string& url = config_.endpoint;
  auto scheme_end = url.find("://");
  if (url.empty() || scheme_end == std::string::npos) {
    throw Error(ErrorCode::ArgumentError, "JUDGE_ENDPOINT must be an http(s) URL, got '" + url + "'");
  }
  auto path_start = url.find('/', scheme_end + 3);
  base_ = url.substr(0, path_start);
  path_ = path_start == std::string::npos ? "/v1/chat/completions" : url.substr(path_start);
}

GenerationReply HttpTransport::generate(const GenerationRequest& request) {
  json body;
  if (!config_.model.empty()) body["model"] = config_.model;
  body["messages"] = json::array({{{"role", "system"}, {"content", request.system}},
                                  {{"role", "user"}, {"content", request.user}}});
  if (request.decode.temperature) body["temperature"] = *request.decode.temperature;
  if (request.decode.max_tokens) body["max_tokens"] = *request.decode.max_tokens;

  httplib::Client client(base_);
  auto secs = static_cast<time_t>(config_.timeout_seconds);
  auto usecs = static_cast<time_t>((config_.timeout_seconds - static_cast<double>(secs)) * 1e6);
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);
  httplib::Headers headers;
  if (!config_.api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + config_.api_key);
  }
  auto res = client.Post(path_, headers, body.dump(), "application/json");
  if (!res) {
    throw Error(ErrorCode::TransportError, "request " + request.request_id + ": " +
                                               httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw Error(ErrorCode::TransportError, "request " + request.request_id + ": HTTP " +
                                               std::to_string(res->status));
  }
  json reply = json::parse(res->body, nullptr, false);
  if (reply.is_discarded() || !reply.contains("choices") || reply["choices"].empty()) {
    throw Error(ErrorCode::TransportError,
                "request " + request.request_id + ": unexpected response body");
  }
  const json& choice = reply["choices"][0];
  GenerationReply out;
  if (choice.contains("message") && choice["message"].contains("content") &&
      choice["message"]["content"].is_string()) {
    out.text = choice["message"]["content"].get<std::string>();
  } else {
    throw Error(ErrorCode::TransportError,
                "request " + request.request_id + ": reply has no message content");
  }
  if (choice.contains("finish_reason") && choice["finish_reason"].is_string()) {
    out.finish_reason = choice["finish_reason"].get<std::string>();
  }
  return out;
}

}  // namespace rubric_reward
