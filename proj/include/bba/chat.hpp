#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace bba {

enum class Role { system, user, assistant };

std::string role_name(Role r);

struct ImageBlob {
  std::vector<std::uint8_t> bytes;
  std::string media_type;  // e.g. "image/svg+xml", "image/png"

  bool operator==(const ImageBlob&) const = default;
};

struct TextPart {
  std::string text;
  bool operator==(const TextPart&) const = default;
};

struct ImagePart {
  ImageBlob image;
  bool operator==(const ImagePart&) const = default;
};

using Part = std::variant<TextPart, ImagePart>;

struct Message {
  Role role = Role::user;
  std::vector<Part> parts;

  bool operator==(const Message&) const = default;

  static Message system(std::string text);
  static Message user_text(std::string text);

  // Concatenation of all text parts.
  std::string joined_text() const;
  int image_part_count() const;
};

struct ChatRequest {
  std::string model_id;
  std::vector<Message> messages;
  double temperature = 0.0;
  double top_p = 1.0;
  int max_tokens = 2048;

  bool operator==(const ChatRequest&) const = default;
};

// Empty list when the request satisfies its invariants; otherwise one
// violation description per problem.
std::vector<std::string> validate_request(const ChatRequest& req);

enum class FinishReason { stop, length, content_filter, other };

std::string finish_reason_name(FinishReason r);
FinishReason finish_reason_from_name(const std::string& name);

struct ChatResponse {
  std::string text;
  int prompt_tokens = 0;
  int completion_tokens = 0;
  FinishReason finish_reason = FinishReason::stop;
  // Non-fatal notes attached by the backend, e.g. a truncation warning
  // when finish_reason == length.
  std::vector<std::string> warnings;

  bool operator==(const ChatResponse&) const = default;
};

struct TokenUsage {
  long prompt_tokens = 0;
  long completion_tokens = 0;

  TokenUsage& operator+=(const ChatResponse& resp) {
    prompt_tokens += resp.prompt_tokens;
    completion_tokens += resp.completion_tokens;
    return *this;
  }
  long total() const { return prompt_tokens + completion_tokens; }
  bool operator==(const TokenUsage&) const = default;
};

}  // namespace bba
