#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "csi/config.hpp"
#include "csi/topology.hpp"

namespace csi {

struct HumanAuthor {
  std::string participant;
  bool operator==(const HumanAuthor&) const = default;
};

/// An observer agent relaying content that originated in `source_room`.
struct ObserverAuthor {
  std::size_t source_room = 0;
  bool operator==(const ObserverAuthor&) const = default;
};

using Author = std::variant<HumanAuthor, ObserverAuthor>;

inline bool is_human(const Author& a) { return std::holds_alternative<HumanAuthor>(a); }
inline bool is_observer(const Author& a) { return std::holds_alternative<ObserverAuthor>(a); }

struct Message {
  std::uint64_t seq = 0;
  std::size_t room = 0;
  Author author;
  std::string text;
  Millis t{0};

  bool operator==(const Message&) const = default;
};

enum class Phase { open, closed };

struct DueEvent {
  enum class Kind { relay_due, snapshot_due, session_end };
  Kind kind = Kind::snapshot_due;
  Millis t{0};
  std::size_t room = 0;  // relay_due only

  bool operator==(const DueEvent&) const = default;
};

std::string describe(const DueEvent& event);

/// Live state of one deliberation: rooms, transcripts, and the logical clock.
///
/// A Session is its own serialization domain. Every public member takes an
/// internal lock, so mutations are atomic and totally ordered, and reads
/// return consistent copies. The clock only moves through advance_clock.
class Session {
 public:
  using EventHandler = std::function<void(const DueEvent&)>;

  /// Throws ConfigError for an invalid config, ValidationError for an empty
  /// or duplicated participant list.
  Session(SwarmConfig config, std::vector<std::string> participant_ids);

  Session(const Session&) = delete;
  Session& operator=(const Session&) = delete;

  const SwarmConfig& config() const { return config_; }
  const PartitionPlan& plan() const { return plan_; }
  const Topology& topology() const { return topology_; }
  const std::vector<std::string>& participants() const { return participant_ids_; }
  std::size_t room_count() const { return plan_.room_count(); }

  /// Room of a participant, or nullopt for an unknown id.
  std::optional<std::size_t> room_of(const std::string& participant) const;
  std::vector<std::string> room_members(std::size_t room) const;

  Millis clock() const;
  Phase phase() const;

  /// Appends to `room` at the current clock and returns the new seq.
  ///
  /// Throws SessionClosedError after close, ValidationError for an unknown
  /// room or empty / non UTF-8 text, and AuthorizationError when a human
  /// posts outside their room or an observer posts along a missing edge.
  std::uint64_t post_message(std::size_t room, const Author& author, std::string text);

  /// Messages of `room` with seq >= since_seq, in seq order.
  std::vector<Message> transcript_window(std::size_t room, std::uint64_t since_seq) const;
  std::vector<Message> transcript(std::size_t room) const { return transcript_window(room, 0); }

  /// Messages from all rooms with after < t <= upto, ordered by (t, room, seq).
  std::vector<Message> messages_between(Millis after, Millis upto) const;

  /// Moves the clock forward by dt and returns every relay / snapshot
  /// boundary crossed, in time order (relays before the snapshot at equal
  /// times), followed by session_end once the duration is reached.
  ///
  /// `on_event` runs for each event before the session closes, so handlers
  /// may still post at t == duration. The clock saturates at the duration.
  /// After close this is a no-op returning an empty list.
  std::vector<DueEvent> advance_clock(Millis dt, const EventHandler& on_event = {});

 private:
  void check_room(std::size_t room) const;

  SwarmConfig config_;
  std::vector<std::string> participant_ids_;
  std::unordered_map<std::string, std::size_t> participant_index_;
  PartitionPlan plan_;
  Topology topology_;

  mutable std::mutex mutex_;
  std::vector<std::vector<Message>> transcripts_;
  Millis clock_{0};
  Phase phase_ = Phase::open;
};

}  // namespace csi
