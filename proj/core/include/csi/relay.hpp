#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "csi/config.hpp"
#include "csi/counting.hpp"
#include "csi/session.hpp"

namespace csi {

struct RankedOption {
  std::uint32_t option = 0;
  double weight = 0.0;
  bool operator==(const RankedOption&) const = default;
};

/// What an observer took away from its room's recent dialog.
struct Distillation {
  std::vector<RankedOption> top_options;  // descending weight, positive only
  std::map<std::uint32_t, std::vector<std::string>> rationales;  // most supported first
  bool empty = true;

  bool operator==(const Distillation&) const = default;
};

/// How observer content is distilled.
///
/// kind == external_llm requires "endpoint" and "timeout" parameters
/// ("model" and "api_key" are optional). Timeout is in seconds.
struct DistillerBinding {
  enum class Kind { mock, external_llm };
  Kind kind = Kind::mock;
  std::map<std::string, std::string> parameters;

  static DistillerBinding mock() { return {}; }

  /// Reads CSI_LLM_ENDPOINT, CSI_LLM_MODEL, CSI_LLM_TIMEOUT_S and
  /// CSI_LLM_API_KEY. Falls back to mock when no endpoint is set.
  static DistillerBinding from_environment();
};

/// Throws ConfigError when an external binding lacks endpoint or timeout.
void validate(const DistillerBinding& binding);

/// Number of options and rationales carried per relay.
inline constexpr std::size_t kRelayTopOptions = 2;

/// Deterministic reference distiller.
///
/// Weights are clipped net mention counts from the echo-damped tally: human
/// messages only, or the observer messages when no human wrote in the window.
/// Rationales are ranked by frequency, then by earliest seq.
Distillation distill_mock(std::span<const Message> window, std::span<const AnswerOption> options,
                          const Lexicon& lexicon = Lexicon::english_v1());

/// Distills with the given binding.
///
/// The external path falls back to distill_mock when the response does not
/// parse. Returns nullopt when the endpoint times out or is unreachable; the
/// caller skips that relay.
std::optional<Distillation> distill(std::span<const Message> window,
                                    std::span<const AnswerOption> options,
                                    const DistillerBinding& binding);

/// "In my other discussion, most support is for 720 because the jar is tall."
/// The second-ranked option, if any, follows as "Some also argued for ...".
///
/// Throws ContractViolation on an empty distillation.
std::string render_first_person(const Distillation& d, std::span<const AnswerOption> options);

/// The set of observer agents of one session, one per room.
///
/// Each agent keeps a cursor into its room's transcript so no message is
/// distilled twice. A round snapshots every room's window before any post is
/// applied, so relays in the same round never see each other.
class ObserverRelay {
 public:
  explicit ObserverRelay(std::size_t room_count, DistillerBinding binding = DistillerBinding::mock());

  struct Window {
    std::size_t source_room = 0;
    std::size_t target_room = 0;
    std::vector<Message> messages;
  };

  struct Pending {
    std::size_t source_room = 0;
    std::size_t target_room = 0;
    std::string text;
  };

  /// Reads the new messages of `room` and advances its cursor.
  /// Returns nullopt when the room has no outgoing edge.
  std::optional<Window> take_window(const Session& session, std::size_t room);

  /// Distills a window into a post, or nullopt when there is nothing to say
  /// (empty distillation or a skipped external call).
  std::optional<Pending> prepare(const Window& window, std::span<const AnswerOption> options) const;

  /// Posts as ObserverAuthor{source_room}.
  Message apply(Session& session, const Pending& pending) const;

  /// Windows of every room with an outgoing edge, taken before any post.
  std::vector<Window> take_round(const Session& session);

  /// prepare() over a round's windows; external distillation runs concurrently.
  std::vector<Pending> prepare_round(const std::vector<Window>& windows,
                                     std::span<const AnswerOption> options) const;

  /// take_window + prepare + apply for a single room.
  std::optional<Message> relay_step(Session& session, std::size_t source_room);

  /// Every room relays once. External distillation runs concurrently.
  std::vector<Message> relay_round(Session& session);

  std::uint64_t cursor(std::size_t room) const { return cursors_.at(room); }
  const DistillerBinding& binding() const { return binding_; }

 private:
  DistillerBinding binding_;
  std::vector<std::uint64_t> cursors_;
};

}  // namespace csi
