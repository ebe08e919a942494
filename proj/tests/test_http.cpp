#include <doctest.h>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>
#include <json.hpp>

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <thread>

#include "bba/backend.hpp"
#include "bba/errors.hpp"
#include "bba/util.hpp"

using namespace bba;
using nlohmann::json;

namespace {

// In-process chat-completions server for exercising the http transport.
class FakeServer {
 public:
  using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;

  explicit FakeServer(Handler handler) : handler_(std::move(handler)) {
    server_.Post("/v1/chat/completions", [this](const httplib::Request& req,
                                                httplib::Response& res) {
      ++hits_;
      last_body_ = req.body;
      last_auth_ = req.get_header_value("Authorization");
      handler_(req, res);
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  ~FakeServer() {
    server_.stop();
    thread_.join();
  }

  std::string endpoint() const {
    return "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions";
  }
  int hits() const { return hits_.load(); }
  std::string last_body() const { return last_body_; }
  std::string last_auth() const { return last_auth_; }

  static void reply_text(httplib::Response& res, const std::string& text,
                         const std::string& finish = "stop") {
    json payload{{"choices",
                  {{{"message", {{"role", "assistant"}, {"content", text}}},
                    {"finish_reason", finish}}}},
                 {"usage", {{"prompt_tokens", 7}, {"completion_tokens", 3}}}};
    res.set_content(payload.dump(), "application/json");
  }

 private:
  httplib::Server server_;
  Handler handler_;
  int port_ = 0;
  std::thread thread_;
  std::atomic<int> hits_{0};
  std::string last_body_;
  std::string last_auth_;
};

ChatRequest sample_request() {
  ChatRequest req;
  req.model_id = "gpt-4-vision-preview";
  req.messages.push_back(Message::system("be precise"));
  Message user;
  user.role = Role::user;
  user.parts.push_back(TextPart{"what is shown?"});
  user.parts.push_back(ImagePart{ImageBlob{{0x01, 0x02, 0x03}, "image/png"}});
  req.messages.push_back(std::move(user));
  return req;
}

HttpBackend fast_http(const std::string& endpoint) {
  HttpBackend http;
  http.endpoint = endpoint;
  http.credential_env = "BBA_TEST_KEY";
  http.retry.max_attempts = 3;
  http.retry.base_delay_ms = 5;
  http.retry.max_delay_ms = 20;
  return http;
}

}  // namespace

TEST_CASE("http backend speaks the chat-completions wire format") {
  setenv("BBA_TEST_KEY", "sk-test-123", 1);
  FakeServer server([](const httplib::Request&, httplib::Response& res) {
    FakeServer::reply_text(res, "a triangle");
  });
  ChatBackend backend(fast_http(server.endpoint()));
  ChatResponse resp = backend.complete(sample_request());

  CHECK(resp.text == "a triangle");
  CHECK(resp.prompt_tokens == 7);
  CHECK(resp.completion_tokens == 3);
  CHECK(resp.finish_reason == FinishReason::stop);
  CHECK(server.last_auth() == "Bearer sk-test-123");

  json body = json::parse(server.last_body());
  CHECK(body["model"] == "gpt-4-vision-preview");
  CHECK(body["temperature"] == 0.0);
  CHECK(body["top_p"] == 1.0);
  CHECK(body["max_tokens"] == 2048);
  REQUIRE(body["messages"].size() == 2);
  CHECK(body["messages"][0]["role"] == "system");
  CHECK(body["messages"][0]["content"] == "be precise");
  const json& parts = body["messages"][1]["content"];
  REQUIRE(parts.size() == 2);
  CHECK(parts[0]["type"] == "text");
  CHECK(parts[1]["type"] == "image_url");
  std::string url = parts[1]["image_url"]["url"].get<std::string>();
  CHECK(url.rfind("data:image/png;base64,", 0) == 0);
  CHECK(url.substr(url.find(',') + 1) == util::base64_encode({0x01, 0x02, 0x03}));
  unsetenv("BBA_TEST_KEY");
}

TEST_CASE("http backend retries 5xx and 429 with backoff, then succeeds") {
  std::atomic<int> failures_left{2};
  FakeServer server([&](const httplib::Request&, httplib::Response& res) {
    if (failures_left.fetch_sub(1) > 0) {
      res.status = failures_left.load() % 2 == 0 ? 500 : 429;
      res.set_content("busy", "text/plain");
      return;
    }
    FakeServer::reply_text(res, "ok after retries");
  });
  ChatBackend backend(fast_http(server.endpoint()));
  ChatResponse resp = backend.complete(sample_request());
  CHECK(resp.text == "ok after retries");
  CHECK(server.hits() == 3);
}

TEST_CASE("http backend gives up after the retry budget") {
  FakeServer server([](const httplib::Request&, httplib::Response& res) {
    res.status = 503;
    res.set_content("down", "text/plain");
  });
  ChatBackend backend(fast_http(server.endpoint()));
  CHECK_THROWS_AS(backend.complete(sample_request()), TransportError);
  CHECK(server.hits() == 3);  // max_attempts
}

TEST_CASE("http backend does not retry non-retryable statuses") {
  FakeServer server([](const httplib::Request&, httplib::Response& res) {
    res.status = 400;
    res.set_content("{\"error\":{\"message\":\"bad request\"}}", "application/json");
  });
  ChatBackend backend(fast_http(server.endpoint()));
  CHECK_THROWS_WITH_AS(backend.complete(sample_request()), doctest::Contains("400"),
                       TransportError);
  CHECK(server.hits() == 1);
}

TEST_CASE("finish_reason length from the wire carries a warning") {
  FakeServer server([](const httplib::Request&, httplib::Response& res) {
    FakeServer::reply_text(res, "truncated tex", "length");
  });
  ChatBackend backend(fast_http(server.endpoint()));
  ChatResponse resp = backend.complete(sample_request());
  CHECK(resp.finish_reason == FinishReason::length);
  REQUIRE_FALSE(resp.warnings.empty());
}

TEST_CASE("http transcript replays byte-identically from the cache") {
  auto dir = std::filesystem::temp_directory_path() / "bba_http_tests";
  std::filesystem::create_directories(dir);
  std::string cache = (dir / "http_replay.jsonl").string();
  std::remove(cache.c_str());

  std::atomic<int> counter{0};
  FakeServer server([&](const httplib::Request&, httplib::Response& res) {
    FakeServer::reply_text(res, "reply #" + std::to_string(counter.fetch_add(1)));
  });

  std::vector<ChatRequest> request_set;
  for (int i = 0; i < 4; ++i) {
    ChatRequest req = sample_request();
    req.messages[1].parts[0] = TextPart{"question " + std::to_string(i)};
    request_set.push_back(std::move(req));
  }

  std::vector<std::string> recorded;
  {
    auto http = std::make_shared<ChatBackend>(fast_http(server.endpoint()));
    ChatBackend recording(ReplayBackend{cache, false, http});
    for (const ChatRequest& req : request_set)
      recorded.push_back(recording.complete(req).text);
  }
  CHECK(server.hits() == 4);

  ChatBackend replay(ReplayBackend{cache, true, nullptr});
  for (std::size_t i = 0; i < request_set.size(); ++i) {
    ChatResponse resp = replay.complete(request_set[i]);
    CHECK(resp.text == recorded[i]);
  }
  CHECK(server.hits() == 4);  // untouched by the replay pass
  CHECK(replay.network_calls() == 0);
}
