#include "csi/gateway/envelope.hpp"

#include <nlohmann/json.hpp>

namespace csi::gateway {

using nlohmann::ordered_json;

namespace {

[[noreturn]] void bad(const std::string& detail) { throw EnvelopeError("bad_envelope", detail); }

std::string required_string(const nlohmann::json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string()) bad(std::string("missing string field \"") + key + "\"");
  return it->get<std::string>();
}

}  // namespace

ClientEnvelope parse_client_envelope(std::string_view line) {
  const auto j = nlohmann::json::parse(line, nullptr, false);
  if (j.is_discarded()) bad("not valid JSON");
  if (!j.is_object()) bad("envelope must be a JSON object");
  const auto type = required_string(j, "type");
  if (type == "join") return JoinRequest{required_string(j, "session_id"), required_string(j, "display_name")};
  if (type == "chat") return ChatRequest{required_string(j, "text")};
  if (type == "survey_response") {
    auto it = j.find("option_id");
    if (it == j.end() || !it->is_number_unsigned()) bad("missing non-negative integer field \"option_id\"");
    return SurveyResponse{it->get<std::uint32_t>()};
  }
  bad("unknown envelope type \"" + type + "\"");
}

std::string room_assigned(std::size_t room_id, std::span<const std::string> member_names) {
  ordered_json j;
  j["type"] = "room_assigned";
  j["room_id"] = room_id;
  j["member_names"] = std::vector<std::string>(member_names.begin(), member_names.end());
  return j.dump();
}

std::string message_envelope(const Message& m) {
  ordered_json j;
  j["type"] = "message";
  j["seq"] = m.seq;
  j["t"] = to_seconds(m.t);
  if (const auto* h = std::get_if<HumanAuthor>(&m.author)) {
    j["author_kind"] = "human";
    j["author_label"] = h->participant;
  } else {
    j["author_kind"] = "observer";
    j["author_label"] = kObserverLabel;
  }
  j["text"] = m.text;
  return j.dump();
}

std::string timer_envelope(long remaining_s) {
  ordered_json j;
  j["type"] = "timer";
  j["remaining_s"] = remaining_s;
  return j.dump();
}

std::string survey_open(std::span<const AnswerOption> options) {
  ordered_json list = ordered_json::array();
  for (const auto& o : options) list.push_back(ordered_json{{"id", o.id}, {"label", o.label}, {"value", o.value}});
  ordered_json j;
  j["type"] = "survey_open";
  j["options"] = list;
  return j.dump();
}

std::string session_end() { return R"({"type":"session_end"})"; }

std::string error_envelope(std::string_view code, std::string_view detail) {
  ordered_json j;
  j["type"] = "error";
  j["code"] = code;
  j["detail"] = detail;
  return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

std::string join_envelope(std::string_view session_id, std::string_view display_name) {
  ordered_json j;
  j["type"] = "join";
  j["session_id"] = session_id;
  j["display_name"] = display_name;
  return j.dump();
}

std::string chat_envelope(std::string_view text) {
  ordered_json j;
  j["type"] = "chat";
  j["text"] = text;
  return j.dump();
}

std::string survey_response_envelope(std::uint32_t option_id) {
  ordered_json j;
  j["type"] = "survey_response";
  j["option_id"] = option_id;
  return j.dump();
}

}  // namespace csi::gateway
