#pragma once

// Wire envelopes exchanged with participant clients. One JSON object per
// line; "type" selects the schema and the payload fields sit beside it.
// docs/protocol.md is the shared schema document.

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "csi/config.hpp"
#include "csi/errors.hpp"
#include "csi/session.hpp"

namespace csi::gateway {

inline constexpr std::array<std::string_view, 3> kClientTypes{"join", "chat", "survey_response"};
inline constexpr std::array<std::string_view, 6> kServerTypes{
    "room_assigned", "message", "timer", "survey_open", "session_end", "error"};

/// Label clients see for observer-authored messages.
inline constexpr std::string_view kObserverLabel = "AI observer";

struct JoinRequest {
  std::string session_id;
  std::string display_name;
};

struct ChatRequest {
  std::string text;
};

struct SurveyResponse {
  std::uint32_t option_id = 0;
};

using ClientEnvelope = std::variant<JoinRequest, ChatRequest, SurveyResponse>;

/// Inbound line that is not valid JSON, has an unknown type, or lacks a
/// required field. `code` is what the error envelope carries.
class EnvelopeError : public Error {
 public:
  EnvelopeError(std::string code, const std::string& detail) : Error(detail), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

/// Throws EnvelopeError with code "bad_envelope".
ClientEnvelope parse_client_envelope(std::string_view line);

// Server-to-client envelopes, serialized without the trailing newline.
std::string room_assigned(std::size_t room_id, std::span<const std::string> member_names);
std::string message_envelope(const Message& m);
std::string timer_envelope(long remaining_s);
std::string survey_open(std::span<const AnswerOption> options);
std::string session_end();
std::string error_envelope(std::string_view code, std::string_view detail);

// Client-side encoders, used by tests and tools that act as participants.
std::string join_envelope(std::string_view session_id, std::string_view display_name);
std::string chat_envelope(std::string_view text);
std::string survey_response_envelope(std::uint32_t option_id);

}  // namespace csi::gateway
