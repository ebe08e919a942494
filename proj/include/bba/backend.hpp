#pragma once

#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "bba/chat.hpp"

namespace bba {

struct RetryPolicy {
  int max_attempts = 5;
  int base_delay_ms = 250;
  int max_delay_ms = 10'000;
  // Jitter seed; fixed so backoff schedules are reproducible in tests.
  unsigned seed = 0x9e3779b9u;
};

// Backoff delay before retry `attempt` (1-based), exponential with jitter.
int retry_delay_ms(const RetryPolicy& policy, int attempt, unsigned salt);

class ChatBackend;

struct HttpBackend {
  // Full chat-completions URL, e.g. "https://host/v1/chat/completions".
  std::string endpoint;
  // Name of the environment variable holding the API credential.
  std::string credential_env = "BBA_API_KEY";
  RetryPolicy retry;
  int timeout_seconds = 120;
};

struct ReplayBackend {
  std::string cache_path;
  // Strict mode forbids cache misses. Non-strict mode forwards misses to
  // `fallback` (when set) and records the answers; with no fallback a
  // miss is still an error.
  bool strict = true;
  std::shared_ptr<ChatBackend> fallback;
};

struct ScriptedBackend {
  std::deque<ChatResponse> responses;

  static ScriptedBackend from_texts(const std::vector<std::string>& texts);
};

using BackendKind = std::variant<ScriptedBackend, ReplayBackend, HttpBackend>;

// Deterministic 256-bit digest (hex) over a canonical serialization of
// the request: model id, decoding params, every message's role and parts
// in order, image bytes hashed.
std::string request_hash(const ChatRequest& req);

// One replay-cache record; JSON-lines on disk, one object per line with
// fields {hash, response_text, prompt_tokens, completion_tokens,
// finish_reason}.
struct CacheRecord {
  std::string hash;
  ChatResponse response;
};

std::vector<CacheRecord> load_replay_cache(const std::string& path);

// Thread-safe chat-completion client over one of the three backends.
// complete() never mutates its request; concurrent identical requests may
// both reach the network but the cache ends consistent.
class ChatBackend {
 public:
  explicit ChatBackend(BackendKind kind);
  ~ChatBackend();

  ChatBackend(const ChatBackend&) = delete;
  ChatBackend& operator=(const ChatBackend&) = delete;

  ChatResponse complete(const ChatRequest& req);

  // Number of requests served by the network (or the scripted queue)
  // rather than the replay cache.
  long network_calls() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace bba
