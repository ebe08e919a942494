#include "bba/backend.hpp"

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <thread>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>
#include <json.hpp>

#include "bba/errors.hpp"
#include "bba/util.hpp"

namespace bba {

namespace {

using nlohmann::json;

json canonical_request_json(const ChatRequest& req) {
  json messages = json::array();
  for (const Message& m : req.messages) {
    json parts = json::array();
    for (const Part& part : m.parts) {
      if (const auto* t = std::get_if<TextPart>(&part)) {
        parts.push_back({{"text", t->text}});
      } else {
        const auto& img = std::get<ImagePart>(part).image;
        parts.push_back({{"image_media", img.media_type},
                         {"image_sha256", util::sha256_hex(img.bytes.data(), img.bytes.size())}});
      }
    }
    messages.push_back({{"parts", parts}, {"role", role_name(m.role)}});
  }
  return json{{"max_tokens", req.max_tokens},
              {"messages", messages},
              {"model_id", req.model_id},
              {"temperature", req.temperature},
              {"top_p", req.top_p}};
}

void attach_length_warning(ChatResponse& resp) {
  if (resp.finish_reason == FinishReason::length && resp.warnings.empty())
    resp.warnings.push_back("finish_reason=length: output truncated at max_tokens");
}

json wire_message(const Message& m) {
  if (m.image_part_count() == 0) {
    return {{"role", role_name(m.role)}, {"content", m.joined_text()}};
  }
  json content = json::array();
  for (const Part& part : m.parts) {
    if (const auto* t = std::get_if<TextPart>(&part)) {
      content.push_back({{"type", "text"}, {"text", t->text}});
    } else {
      const auto& img = std::get<ImagePart>(part).image;
      std::string url = "data:" + img.media_type + ";base64," + util::base64_encode(img.bytes);
      content.push_back({{"type", "image_url"}, {"image_url", {{"url", url}}}});
    }
  }
  return {{"role", role_name(m.role)}, {"content", content}};
}

std::string wire_body(const ChatRequest& req) {
  json body;
  body["model"] = req.model_id;
  json messages = json::array();
  for (const Message& m : req.messages) messages.push_back(wire_message(m));
  body["messages"] = std::move(messages);
  body["temperature"] = req.temperature;
  body["top_p"] = req.top_p;
  body["max_tokens"] = req.max_tokens;
  return body.dump();
}

ChatResponse parse_wire_response(const std::string& body) {
  json payload;
  try {
    payload = json::parse(body);
  } catch (const json::exception& ex) {
    throw TransportError(std::string("malformed completion response: ") + ex.what());
  }
  if (!payload.contains("choices") || payload["choices"].empty())
    throw TransportError("completion response has no choices");
  const json& choice = payload["choices"][0];
  ChatResponse resp;
  const json& message = choice.value("message", json::object());
  if (message.contains("content") && message["content"].is_string()) {
    resp.text = message["content"].get<std::string>();
  } else if (message.contains("content") && message["content"].is_array()) {
    for (const auto& piece : message["content"]) {
      if (piece.is_object() && piece.value("type", "") == "text")
        resp.text += piece.value("text", "");
    }
  }
  resp.finish_reason = finish_reason_from_name(choice.value("finish_reason", "other"));
  if (payload.contains("usage") && payload["usage"].is_object()) {
    resp.prompt_tokens = payload["usage"].value("prompt_tokens", 0);
    resp.completion_tokens = payload["usage"].value("completion_tokens", 0);
  }
  attach_length_warning(resp);
  return resp;
}

// Splits "https://host:port/path" into base url and path.
std::pair<std::string, std::string> split_endpoint(const std::string& endpoint) {
  std::size_t scheme = endpoint.find("://");
  std::size_t path_start = scheme == std::string::npos
                               ? endpoint.find('/')
                               : endpoint.find('/', scheme + 3);
  if (path_start == std::string::npos) return {endpoint, "/"};
  return {endpoint.substr(0, path_start), endpoint.substr(path_start)};
}

bool retryable_status(int status) {
  return status == 429 || status == 408 || status >= 500;
}

int approx_prompt_tokens(const ChatRequest& req) {
  int total = 0;
  for (const Message& m : req.messages) total += util::approx_token_count(m.joined_text());
  return total;
}

}  // namespace

int retry_delay_ms(const RetryPolicy& policy, int attempt, unsigned salt) {
  long delay = policy.base_delay_ms;
  for (int i = 1; i < attempt && delay < policy.max_delay_ms; ++i) delay *= 2;
  if (delay > policy.max_delay_ms) delay = policy.max_delay_ms;
  // Deterministic jitter in [0.5, 1.0] from (seed, salt, attempt).
  unsigned h = policy.seed ^ (salt * 2654435761u) ^ (static_cast<unsigned>(attempt) * 40503u);
  h ^= h >> 16;
  h *= 2246822519u;
  h ^= h >> 13;
  double jitter = 0.5 + 0.5 * (h % 10000) / 10000.0;
  return static_cast<int>(delay * jitter);
}

ScriptedBackend ScriptedBackend::from_texts(const std::vector<std::string>& texts) {
  ScriptedBackend backend;
  for (const std::string& t : texts) {
    ChatResponse resp;
    resp.text = t;
    resp.completion_tokens = util::approx_token_count(t);
    backend.responses.push_back(std::move(resp));
  }
  return backend;
}

std::string request_hash(const ChatRequest& req) {
  return util::sha256_hex(canonical_request_json(req).dump());
}

std::vector<CacheRecord> load_replay_cache(const std::string& path) {
  std::ifstream in(path);
  if (!in) return {};
  std::vector<CacheRecord> records;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (util::trim(line).empty()) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::exception& ex) {
      throw SchemaError("replay cache parse error: " + std::string(ex.what()), line_no);
    }
    for (const char* field : {"hash", "response_text", "prompt_tokens",
                              "completion_tokens", "finish_reason"}) {
      if (!rec.contains(field))
        throw SchemaError(std::string("replay cache record missing field '") + field + "'",
                          line_no);
    }
    CacheRecord out;
    out.hash = rec["hash"].get<std::string>();
    out.response.text = rec["response_text"].get<std::string>();
    out.response.prompt_tokens = rec["prompt_tokens"].get<int>();
    out.response.completion_tokens = rec["completion_tokens"].get<int>();
    out.response.finish_reason =
        finish_reason_from_name(rec["finish_reason"].get<std::string>());
    records.push_back(std::move(out));
  }
  return records;
}

struct ChatBackend::Impl {
  enum class Mode { scripted, replay, http };
  Mode mode = Mode::scripted;

  // scripted
  std::mutex queue_mutex;
  std::deque<ChatResponse> queue;

  // replay
  std::string cache_path;
  bool strict = true;
  std::unordered_map<std::string, ChatResponse> snapshot;  // immutable after load
  std::mutex overlay_mutex;                                // guards overlay + file appends
  std::unordered_map<std::string, ChatResponse> overlay;

  // http
  std::optional<HttpBackend> http;
  // replay fallback transport (any backend kind)
  std::shared_ptr<ChatBackend> fallback;

  std::atomic<long> network_calls{0};

  ChatResponse http_complete(const ChatRequest& req, unsigned salt);
  void append_cache_record(const std::string& hash, const ChatResponse& resp);
};

ChatResponse ChatBackend::Impl::http_complete(const ChatRequest& req, unsigned salt) {
  const HttpBackend& cfg = *http;
  auto [base, path] = split_endpoint(cfg.endpoint);
  std::string body = wire_body(req);
  std::string credential;
  if (!cfg.credential_env.empty()) {
    if (const char* value = std::getenv(cfg.credential_env.c_str())) credential = value;
  }

  std::string last_error;
  for (int attempt = 1; attempt <= cfg.retry.max_attempts; ++attempt) {
    if (attempt > 1) {
      std::this_thread::sleep_for(
          std::chrono::milliseconds(retry_delay_ms(cfg.retry, attempt - 1, salt)));
    }
    httplib::Client client(base);
    client.set_connection_timeout(cfg.timeout_seconds, 0);
    client.set_read_timeout(cfg.timeout_seconds, 0);
    httplib::Headers headers;
    if (!credential.empty()) headers.emplace("Authorization", "Bearer " + credential);
    auto res = client.Post(path, headers, body, "application/json");
    network_calls.fetch_add(1, std::memory_order_relaxed);
    if (!res) {
      last_error = "transport failure: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 200 && res->status < 300) return parse_wire_response(res->body);
    if (retryable_status(res->status)) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    throw TransportError("HTTP " + std::to_string(res->status) + ": " +
                         res->body.substr(0, 400));
  }
  throw TransportError("retry budget exhausted (" +
                       std::to_string(cfg.retry.max_attempts) + " attempts): " + last_error);
}

void ChatBackend::Impl::append_cache_record(const std::string& hash,
                                            const ChatResponse& resp) {
  json rec{{"hash", hash},
           {"response_text", resp.text},
           {"prompt_tokens", resp.prompt_tokens},
           {"completion_tokens", resp.completion_tokens},
           {"finish_reason", finish_reason_name(resp.finish_reason)}};
  std::lock_guard<std::mutex> lock(overlay_mutex);
  if (overlay.count(hash) || snapshot.count(hash)) return;  // already recorded
  std::ofstream out(cache_path, std::ios::app);
  if (!out) throw Error("cannot append to replay cache: " + cache_path);
  out << rec.dump() << "\n";
  overlay.emplace(hash, resp);
}

ChatBackend::ChatBackend(BackendKind kind) : impl_(std::make_unique<Impl>()) {
  if (auto* scripted = std::get_if<ScriptedBackend>(&kind)) {
    impl_->mode = Impl::Mode::scripted;
    impl_->queue = std::move(scripted->responses);
  } else if (auto* replay = std::get_if<ReplayBackend>(&kind)) {
    impl_->mode = Impl::Mode::replay;
    impl_->cache_path = replay->cache_path;
    impl_->strict = replay->strict;
    impl_->fallback = replay->fallback;
    for (CacheRecord& rec : load_replay_cache(replay->cache_path))
      impl_->snapshot.emplace(std::move(rec.hash), std::move(rec.response));
  } else {
    impl_->mode = Impl::Mode::http;
    impl_->http = std::get<HttpBackend>(kind);
  }
}

ChatBackend::~ChatBackend() = default;

ChatResponse ChatBackend::complete(const ChatRequest& req) {
  auto violations = validate_request(req);
  if (!violations.empty()) {
    std::string msg = "invalid chat request:";
    for (const std::string& v : violations) msg += " " + v + ";";
    throw Error(msg);
  }

  switch (impl_->mode) {
    case Impl::Mode::scripted: {
      ChatResponse resp;
      {
        std::lock_guard<std::mutex> lock(impl_->queue_mutex);
        if (impl_->queue.empty())
          throw TransportError("scripted backend exhausted: no canned response left");
        resp = std::move(impl_->queue.front());
        impl_->queue.pop_front();
      }
      impl_->network_calls.fetch_add(1, std::memory_order_relaxed);
      if (resp.prompt_tokens == 0) resp.prompt_tokens = approx_prompt_tokens(req);
      attach_length_warning(resp);
      return resp;
    }
    case Impl::Mode::replay: {
      std::string hash = request_hash(req);
      if (auto it = impl_->snapshot.find(hash); it != impl_->snapshot.end()) {
        ChatResponse resp = it->second;
        attach_length_warning(resp);
        return resp;
      }
      {
        std::lock_guard<std::mutex> lock(impl_->overlay_mutex);
        if (auto it = impl_->overlay.find(hash); it != impl_->overlay.end()) {
          ChatResponse resp = it->second;
          attach_length_warning(resp);
          return resp;
        }
      }
      if (impl_->strict || !impl_->fallback)
        throw CacheMissError("replay cache miss for request " + hash, hash);
      ChatResponse resp = impl_->fallback->complete(req);
      impl_->network_calls.fetch_add(1, std::memory_order_relaxed);
      impl_->append_cache_record(hash, resp);
      return resp;
    }
    case Impl::Mode::http: {
      unsigned salt = static_cast<unsigned>(std::hash<std::string>{}(request_hash(req)));
      return impl_->http_complete(req, salt);
    }
  }
  throw Error("unreachable backend mode");
}

long ChatBackend::network_calls() const {
  return impl_->network_calls.load(std::memory_order_relaxed);
}

}  // namespace bba
