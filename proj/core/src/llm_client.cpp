#include "csi/llm_client.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include <httplib.h>

#include "csi/errors.hpp"

namespace csi::llm {

const char* const kSystemInstructions =
    "You observe a small group chat deliberating over a fixed set of answer options. "
    "Report which options the group supports and the main reasons given. Reply with JSON "
    "{\"top_options\": [{\"option\": <label>, \"weight\": <non-negative number>}], "
    "\"rationales\": {<label>: [<short reason>, ...]}} listing the most supported option first.";

nlohmann::json build_request(std::span<const Message> window, std::span<const AnswerOption> options,
                             const std::string& model) {
  std::string dialog;
  for (const auto& m : window) {
    if (const auto* h = std::get_if<HumanAuthor>(&m.author))
      dialog += h->participant;
    else
      dialog += "observer";
    dialog += ": ";
    dialog += m.text;
    dialog += '\n';
  }
  nlohmann::json labels = nlohmann::json::array();
  for (const auto& o : options) labels.push_back(o.label);
  return {{"model", model}, {"system", kSystemInstructions}, {"window", dialog}, {"options", labels}};
}

namespace {

std::optional<std::uint32_t> resolve_option(const nlohmann::json& ref,
                                            std::span<const AnswerOption> options) {
  if (ref.is_number_integer()) {
    const auto id = ref.get<long long>();
    if (id >= 0 && static_cast<std::size_t>(id) < options.size()) return static_cast<std::uint32_t>(id);
    return std::nullopt;
  }
  if (ref.is_string()) {
    const auto label = ref.get<std::string>();
    for (const auto& o : options)
      if (o.label == label) return o.id;
  }
  return std::nullopt;
}

std::optional<Distillation> parse_object(const nlohmann::json& j,
                                         std::span<const AnswerOption> options) {
  if (!j.is_object() || !j.contains("top_options") || !j["top_options"].is_array()) return std::nullopt;
  Distillation d;
  std::vector<bool> seen(options.size(), false);
  for (const auto& entry : j["top_options"]) {
    if (!entry.is_object() || !entry.contains("option") || !entry.contains("weight") ||
        !entry["weight"].is_number())
      return std::nullopt;
    const auto id = resolve_option(entry["option"], options);
    if (!id) return std::nullopt;
    const double w = entry["weight"].get<double>();
    if (!std::isfinite(w) || w < 0.0) return std::nullopt;
    if (w == 0.0 || seen[*id]) continue;
    seen[*id] = true;
    d.top_options.push_back({*id, w});
  }
  std::stable_sort(d.top_options.begin(), d.top_options.end(),
                   [](const RankedOption& a, const RankedOption& b) { return a.weight > b.weight; });
  if (j.contains("rationales")) {
    if (!j["rationales"].is_object()) return std::nullopt;
    for (const auto& [key, list] : j["rationales"].items()) {
      auto id = resolve_option(key, options);
      if (!id) {
        // Keys are always strings in JSON; allow "3" to name id 3.
        try {
          id = resolve_option(std::stoll(key), options);
        } catch (const std::exception&) {
        }
      }
      if (!id || !list.is_array()) return std::nullopt;
      for (const auto& r : list) {
        if (!r.is_string()) return std::nullopt;
        if (!r.get<std::string>().empty()) d.rationales[*id].push_back(r.get<std::string>());
      }
    }
  }
  // Rationales only for options that were reported as supported.
  for (auto it = d.rationales.begin(); it != d.rationales.end();)
    it = seen[it->first] ? std::next(it) : d.rationales.erase(it);
  d.empty = d.top_options.empty();
  return d;
}

}  // namespace

std::optional<Distillation> parse_response(const std::string& body,
                                           std::span<const AnswerOption> options) {
  const auto j = nlohmann::json::parse(body, nullptr, false);
  if (j.is_discarded()) return std::nullopt;
  if (j.is_object() && j.contains("content") && j["content"].is_string()) {
    const auto inner = nlohmann::json::parse(j["content"].get<std::string>(), nullptr, false);
    if (inner.is_discarded()) return std::nullopt;
    return parse_object(inner, options);
  }
  return parse_object(j, options);
}

CallResult call(const DistillerBinding& binding, const nlohmann::json& request) {
  validate(binding);
  const auto& endpoint = binding.parameters.at("endpoint");
  const auto scheme_end = endpoint.find("://");
  const auto path_start = endpoint.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
  const auto base = endpoint.substr(0, path_start);
  const auto path = path_start == std::string::npos ? std::string("/") : endpoint.substr(path_start);

  const auto timeout = std::chrono::duration<double>(std::stod(binding.parameters.at("timeout")));
  const auto micros = std::chrono::duration_cast<std::chrono::microseconds>(timeout);

  httplib::Client client(base);
  client.set_connection_timeout(micros);
  client.set_read_timeout(micros);
  client.set_write_timeout(micros);
  httplib::Headers headers;
  if (auto key = binding.parameters.find("api_key"); key != binding.parameters.end() && !key->second.empty())
    headers.emplace("Authorization", "Bearer " + key->second);

  auto response = client.Post(path, headers, request.dump(), "application/json");
  if (!response || response->status < 200 || response->status >= 300) return {CallStatus::unreachable, {}};
  return {CallStatus::ok, response->body};
}

}  // namespace csi::llm
