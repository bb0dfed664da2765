#include "csi/relay.hpp"

#include <algorithm>
#include <cstdlib>
#include <future>
#include <map>
#include <tuple>

#include <spdlog/spdlog.h>

#include "csi/errors.hpp"
#include "csi/llm_client.hpp"

namespace csi {

DistillerBinding DistillerBinding::from_environment() {
  const char* endpoint = std::getenv("CSI_LLM_ENDPOINT");
  if (endpoint == nullptr || *endpoint == '\0') return mock();
  DistillerBinding b;
  b.kind = Kind::external_llm;
  b.parameters["endpoint"] = endpoint;
  const char* timeout = std::getenv("CSI_LLM_TIMEOUT_S");
  b.parameters["timeout"] = (timeout != nullptr && *timeout != '\0') ? timeout : "10";
  if (const char* model = std::getenv("CSI_LLM_MODEL")) b.parameters["model"] = model;
  if (const char* key = std::getenv("CSI_LLM_API_KEY")) b.parameters["api_key"] = key;
  validate(b);
  return b;
}

void validate(const DistillerBinding& binding) {
  if (binding.kind == DistillerBinding::Kind::mock) return;
  auto endpoint = binding.parameters.find("endpoint");
  if (endpoint == binding.parameters.end() || endpoint->second.empty())
    throw ConfigError("external-llm binding requires an endpoint");
  if (endpoint->second.rfind("http://", 0) != 0 && endpoint->second.rfind("https://", 0) != 0)
    throw ConfigError("external-llm endpoint must be an http(s) URL: " + endpoint->second);
  auto timeout = binding.parameters.find("timeout");
  if (timeout == binding.parameters.end()) throw ConfigError("external-llm binding requires a timeout");
  double seconds = 0.0;
  try {
    seconds = std::stod(timeout->second);
  } catch (const std::exception&) {
    throw ConfigError("external-llm timeout is not a number: " + timeout->second);
  }
  if (!(seconds > 0.0)) throw ConfigError("external-llm timeout must be positive");
}

Distillation distill_mock(std::span<const Message> window, std::span<const AnswerOption> options,
                          const Lexicon& lexicon) {
  const auto tally = tally_echo_damped(window, options, lexicon);
  Distillation d;
  for (std::size_t o = 0; o < options.size(); ++o)
    if (tally.net[o] > 0) d.top_options.push_back({static_cast<std::uint32_t>(o), static_cast<double>(tally.net[o])});
  std::stable_sort(d.top_options.begin(), d.top_options.end(),
                   [](const RankedOption& a, const RankedOption& b) { return a.weight > b.weight; });
  d.empty = d.top_options.empty();

  // Group identical rationales per option; rank by count, then first seq.
  struct Group {
    std::string text;
    std::size_t count = 0;
    std::uint64_t first_seq = 0;
    std::size_t first_index = 0;
  };
  std::map<std::uint32_t, std::vector<Group>> groups;
  for (std::size_t i = 0; i < tally.rationales.size(); ++i) {
    const auto& r = tally.rationales[i];
    if (tally.net[r.option] <= 0) continue;
    auto& list = groups[r.option];
    auto it = std::find_if(list.begin(), list.end(), [&](const Group& g) { return g.text == r.text; });
    if (it == list.end())
      list.push_back({r.text, 1, r.seq, i});
    else
      ++it->count;
  }
  for (auto& [option, list] : groups) {
    std::stable_sort(list.begin(), list.end(), [](const Group& a, const Group& b) {
      return std::tuple(-static_cast<long>(a.count), a.first_seq, a.first_index) <
             std::tuple(-static_cast<long>(b.count), b.first_seq, b.first_index);
    });
    auto& out = d.rationales[option];
    for (auto& g : list) out.push_back(std::move(g.text));
  }
  return d;
}

std::optional<Distillation> distill(std::span<const Message> window,
                                    std::span<const AnswerOption> options,
                                    const DistillerBinding& binding) {
  if (binding.kind == DistillerBinding::Kind::mock) return distill_mock(window, options);
  if (window.empty()) return Distillation{};

  const auto model = binding.parameters.count("model") ? binding.parameters.at("model") : std::string{};
  const auto result = llm::call(binding, llm::build_request(window, options, model));
  if (result.status != llm::CallStatus::ok) {
    spdlog::warn("observer distiller unreachable at {}; skipping this relay",
                 binding.parameters.at("endpoint"));
    return std::nullopt;
  }
  if (auto parsed = llm::parse_response(result.body, options)) return parsed;
  spdlog::warn("observer distiller returned an unparseable response; using the mock distiller");
  return distill_mock(window, options);
}

std::string render_first_person(const Distillation& d, std::span<const AnswerOption> options) {
  if (d.empty || d.top_options.empty())
    throw ContractViolation("render_first_person: distillation is empty");

  const auto clause = [&](std::uint32_t option) {
    std::string s = options[option].label;
    if (auto it = d.rationales.find(option); it != d.rationales.end() && !it->second.empty())
      s += " because " + it->second.front();
    return s;
  };

  std::string text = "In my other discussion, most support is for " + clause(d.top_options[0].option) + ".";
  if (d.top_options.size() >= kRelayTopOptions)
    text += " Some also argued for " + clause(d.top_options[1].option) + ".";
  return text;
}

ObserverRelay::ObserverRelay(std::size_t room_count, DistillerBinding binding)
    : binding_(std::move(binding)), cursors_(room_count, 0) {
  validate(binding_);
}

std::optional<ObserverRelay::Window> ObserverRelay::take_window(const Session& session, std::size_t room) {
  const auto targets = session.topology().targets(room);
  if (targets.empty()) return std::nullopt;
  Window w{room, targets.front(), session.transcript_window(room, cursors_.at(room))};
  if (!w.messages.empty()) cursors_[room] = w.messages.back().seq + 1;
  return w;
}

std::optional<ObserverRelay::Pending> ObserverRelay::prepare(const Window& window,
                                                             std::span<const AnswerOption> options) const {
  if (window.messages.empty()) return std::nullopt;
  const auto d = distill(window.messages, options, binding_);
  if (!d || d->empty) return std::nullopt;
  return Pending{window.source_room, window.target_room, render_first_person(*d, options)};
}

Message ObserverRelay::apply(Session& session, const Pending& pending) const {
  const auto seq = session.post_message(pending.target_room, ObserverAuthor{pending.source_room}, pending.text);
  return session.transcript_window(pending.target_room, seq).front();
}

std::optional<Message> ObserverRelay::relay_step(Session& session, std::size_t source_room) {
  auto window = take_window(session, source_room);
  if (!window) throw ContractViolation("relay_step: room has no outgoing edge");
  auto pending = prepare(*window, session.config().options);
  if (!pending) return std::nullopt;
  return apply(session, *pending);
}

std::vector<ObserverRelay::Window> ObserverRelay::take_round(const Session& session) {
  std::vector<Window> windows;
  for (std::size_t room = 0; room < session.room_count(); ++room)
    if (auto w = take_window(session, room)) windows.push_back(std::move(*w));
  return windows;
}

std::vector<ObserverRelay::Pending> ObserverRelay::prepare_round(const std::vector<Window>& windows,
                                                                 std::span<const AnswerOption> options) const {
  std::vector<std::optional<Pending>> pending(windows.size());
  if (binding_.kind == DistillerBinding::Kind::mock) {
    for (std::size_t i = 0; i < windows.size(); ++i) pending[i] = prepare(windows[i], options);
  } else {
    std::vector<std::future<std::optional<Pending>>> futures;
    futures.reserve(windows.size());
    for (const auto& w : windows)
      futures.push_back(std::async(std::launch::async, [this, &w, options] { return prepare(w, options); }));
    for (std::size_t i = 0; i < futures.size(); ++i) pending[i] = futures[i].get();
  }
  std::vector<Pending> out;
  for (auto& p : pending)
    if (p) out.push_back(std::move(*p));
  return out;
}

std::vector<Message> ObserverRelay::relay_round(Session& session) {
  const auto windows = take_round(session);
  std::vector<Message> posted;
  for (const auto& p : prepare_round(windows, session.config().options)) posted.push_back(apply(session, p));
  return posted;
}

}  // namespace csi
