#include "csi/session.hpp"

#include <algorithm>
#include <string>
#include <tuple>

#include <nlohmann/json.hpp>

#include "csi/errors.hpp"

namespace csi {

namespace {

bool valid_utf8(const std::string& text) {
  try {
    (void)nlohmann::json(text).dump();
    return true;
  } catch (const nlohmann::json::type_error&) {
    return false;
  }
}

}  // namespace

std::string describe(const DueEvent& event) {
  const auto t = std::to_string(event.t.count());
  switch (event.kind) {
    case DueEvent::Kind::relay_due:
      return "relay_due room=" + std::to_string(event.room) + " t_ms=" + t;
    case DueEvent::Kind::snapshot_due:
      return "snapshot_due t_ms=" + t;
    case DueEvent::Kind::session_end:
      return "session_end t_ms=" + t;
  }
  return "unknown";
}

Session::Session(SwarmConfig config, std::vector<std::string> participant_ids)
    : config_(std::move(config)), participant_ids_(std::move(participant_ids)) {
  validate(config_);
  if (participant_ids_.empty()) throw ValidationError("session needs at least one participant");
  for (std::size_t i = 0; i < participant_ids_.size(); ++i) {
    if (!participant_index_.emplace(participant_ids_[i], i).second)
      throw ValidationError("duplicate participant id: " + participant_ids_[i]);
  }
  plan_ = partition(participant_ids_.size(), config_.min_size, config_.max_size, config_.seed);
  topology_ = build_topology(plan_.room_count(), config_.topology_kind);
  transcripts_.resize(plan_.room_count());
}

std::optional<std::size_t> Session::room_of(const std::string& participant) const {
  auto it = participant_index_.find(participant);
  if (it == participant_index_.end()) return std::nullopt;
  return plan_.assignments[it->second];
}

std::vector<std::string> Session::room_members(std::size_t room) const {
  check_room(room);
  std::vector<std::string> out;
  for (std::size_t p = 0; p < participant_ids_.size(); ++p)
    if (plan_.assignments[p] == room) out.push_back(participant_ids_[p]);
  return out;
}

Millis Session::clock() const {
  std::lock_guard lock(mutex_);
  return clock_;
}

Phase Session::phase() const {
  std::lock_guard lock(mutex_);
  return phase_;
}

void Session::check_room(std::size_t room) const {
  if (room >= plan_.room_count())
    throw ValidationError("room " + std::to_string(room) + " does not exist");
}

std::uint64_t Session::post_message(std::size_t room, const Author& author, std::string text) {
  std::lock_guard lock(mutex_);
  if (phase_ == Phase::closed) throw SessionClosedError("session is closed");
  check_room(room);

  if (const auto* human = std::get_if<HumanAuthor>(&author)) {
    auto it = participant_index_.find(human->participant);
    if (it == participant_index_.end())
      throw AuthorizationError("unknown participant: " + human->participant);
    if (plan_.assignments[it->second] != room)
      throw AuthorizationError("participant " + human->participant + " is not in room " +
                               std::to_string(room));
  } else {
    const auto& observer = std::get<ObserverAuthor>(author);
    if (!topology_.has_edge(observer.source_room, room))
      throw AuthorizationError("no relay edge from room " + std::to_string(observer.source_room) +
                               " to room " + std::to_string(room));
  }

  if (text.empty()) throw ValidationError("message text is empty");
  if (!valid_utf8(text)) throw ValidationError("message text is not valid UTF-8");

  auto& transcript = transcripts_[room];
  const std::uint64_t seq = transcript.size();
  transcript.push_back(Message{seq, room, author, std::move(text), clock_});
  return seq;
}

std::vector<Message> Session::transcript_window(std::size_t room, std::uint64_t since_seq) const {
  std::lock_guard lock(mutex_);
  check_room(room);
  const auto& transcript = transcripts_[room];
  if (since_seq >= transcript.size()) return {};
  return {transcript.begin() + static_cast<std::ptrdiff_t>(since_seq), transcript.end()};
}

std::vector<Message> Session::messages_between(Millis after, Millis upto) const {
  std::vector<Message> out;
  {
    std::lock_guard lock(mutex_);
    for (const auto& transcript : transcripts_) {
      auto first = std::upper_bound(transcript.begin(), transcript.end(), after,
                                    [](Millis t, const Message& m) { return t < m.t; });
      for (auto it = first; it != transcript.end() && it->t <= upto; ++it) out.push_back(*it);
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const Message& a, const Message& b) {
    return std::tie(a.t, a.room, a.seq) < std::tie(b.t, b.room, b.seq);
  });
  return out;
}

std::vector<DueEvent> Session::advance_clock(Millis dt, const EventHandler& on_event) {
  if (dt < Millis{0}) throw ContractViolation("advance_clock: dt must be non-negative");

  std::vector<DueEvent> events;
  bool ends = false;
  {
    std::lock_guard lock(mutex_);
    if (phase_ == Phase::closed) return {};
    const Millis from = clock_;
    const Millis to = std::min(clock_ + dt, config_.duration);
    ends = to >= config_.duration;

    // Boundaries k * interval in (from, to].
    const auto relay = config_.relay_interval;
    const auto snap = config_.snapshot_interval;
    Millis next_relay = (from / relay + 1) * relay;
    Millis next_snap = (from / snap + 1) * snap;
    while (next_relay <= to || next_snap <= to) {
      const Millis t = std::min(next_relay, next_snap);
      if (next_relay == t) {
        for (std::size_t room = 0; room < plan_.room_count(); ++room)
          events.push_back({DueEvent::Kind::relay_due, t, room});
        next_relay += relay;
      }
      if (next_snap == t) {
        events.push_back({DueEvent::Kind::snapshot_due, t, 0});
        next_snap += snap;
      }
    }
    if (ends) events.push_back({DueEvent::Kind::session_end, to, 0});
    clock_ = to;
  }

  // Handlers run unlocked so they can post; every event is due at or before
  // the new clock, and the session only closes once they have all run.
  if (on_event)
    for (const auto& e : events) on_event(e);

  if (ends) {
    std::lock_guard lock(mutex_);
    phase_ = Phase::closed;
  }
  return events;
}

}  // namespace csi
