#include "bba/chat.hpp"

#include <algorithm>

namespace bba {

std::string role_name(Role r) {
  switch (r) {
    case Role::system: return "system";
    case Role::user: return "user";
    case Role::assistant: return "assistant";
  }
  return "user";
}

Message Message::system(std::string text) {
  Message m;
  m.role = Role::system;
  m.parts.push_back(TextPart{std::move(text)});
  return m;
}

Message Message::user_text(std::string text) {
  Message m;
  m.role = Role::user;
  m.parts.push_back(TextPart{std::move(text)});
  return m;
}

std::string Message::joined_text() const {
  std::string out;
  for (const auto& part : parts) {
    if (const auto* t = std::get_if<TextPart>(&part)) out += t->text;
  }
  return out;
}

int Message::image_part_count() const {
  return static_cast<int>(std::count_if(parts.begin(), parts.end(), [](const Part& p) {
    return std::holds_alternative<ImagePart>(p);
  }));
}

std::vector<std::string> validate_request(const ChatRequest& req) {
  std::vector<std::string> violations;
  if (req.model_id.empty()) violations.push_back("model_id empty");
  if (req.messages.empty()) violations.push_back("messages empty");
  if (req.temperature < 0) violations.push_back("temperature negative");
  if (!(req.top_p > 0 && req.top_p <= 1)) violations.push_back("top_p out of (0,1]");
  if (req.max_tokens <= 0) violations.push_back("max_tokens not positive");
  for (std::size_t i = 0; i < req.messages.size(); ++i) {
    const Message& m = req.messages[i];
    if (m.role == Role::system && i != 0)
      violations.push_back("system message not first (index " + std::to_string(i) + ")");
    if (m.role == Role::system && m.image_part_count() > 0)
      violations.push_back("system message contains image parts");
    if (m.image_part_count() > 1)
      violations.push_back("message " + std::to_string(i) + " has more than one image part");
  }
  return violations;
}

std::string finish_reason_name(FinishReason r) {
  switch (r) {
    case FinishReason::stop: return "stop";
    case FinishReason::length: return "length";
    case FinishReason::content_filter: return "content_filter";
    case FinishReason::other: return "other";
  }
  return "other";
}

FinishReason finish_reason_from_name(const std::string& name) {
  if (name == "stop") return FinishReason::stop;
  if (name == "length") return FinishReason::length;
  if (name == "content_filter") return FinishReason::content_filter;
  return FinishReason::other;
}

}  // namespace bba
