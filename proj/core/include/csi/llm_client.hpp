#pragma once

#include <optional>
#include <span>
#include <string>

#include <nlohmann/json.hpp>

#include "csi/config.hpp"
#include "csi/relay.hpp"
#include "csi/session.hpp"

namespace csi::llm {

/// Instructions sent with every distillation request.
extern const char* const kSystemInstructions;

/// Request body: {"model", "system", "window", "options"}. `window` is the
/// dialog, one "<speaker>: <text>" line per message; `options` lists labels.
nlohmann::json build_request(std::span<const Message> window, std::span<const AnswerOption> options,
                             const std::string& model);

/// Parses a response into a Distillation.
///
/// Accepts either the object itself or {"content": "<object as JSON text>"}.
/// The object is {"top_options": [{"option": <id or label>, "weight": w}],
/// "rationales": {<id or label>: [text, ...]}}. Options may be named by id or
/// label. Returns nullopt when the response does not fit.
std::optional<Distillation> parse_response(const std::string& body,
                                           std::span<const AnswerOption> options);

enum class CallStatus { ok, unreachable };

struct CallResult {
  CallStatus status = CallStatus::unreachable;
  std::string body;
};

/// POSTs the request to binding.parameters["endpoint"] with the binding's
/// timeout. Non-2xx responses count as unreachable.
CallResult call(const DistillerBinding& binding, const nlohmann::json& request);

}  // namespace csi::llm
