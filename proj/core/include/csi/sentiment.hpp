#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "csi/config.hpp"
#include "csi/counting.hpp"
#include "csi/session.hpp"

namespace csi {

/// Non-negative support per option id.
using RawScores = std::vector<double>;

/// Normalized support per option at one sample instant.
struct SentimentSnapshot {
  Millis t{0};
  std::vector<double> weights;  // indexed by option id, sums to 1

  bool operator==(const SentimentSnapshot&) const = default;
};

enum class FinalEstimateMode {
  last_snapshot,
  /// Exponentially time-weighted mean of per-snapshot estimates (off by default).
  time_decayed,
};

struct DeliberationResult {
  std::vector<SentimentSnapshot> series;
  double final_estimate = 0.0;
  std::uint32_t winning_option = 0;

  bool operator==(const DeliberationResult&) const = default;
};

/// Pluggable session-wide scorer; the mock scorer is the default.
using Scorer = std::function<RawScores(std::span<const Message>, std::span<const AnswerOption>)>;

/// Mock scorer: clipped net mention counts over human messages, pooled over
/// all rooms.
RawScores score_window(std::span<const Message> messages, std::span<const AnswerOption> options,
                       const Lexicon& lexicon = Lexicon::english_v1());

/// Normalizes raw scores to sum 1. An all-zero input carries `previous`
/// forward, or becomes uniform when there is none.
SentimentSnapshot snapshot(const RawScores& raw, const std::optional<SentimentSnapshot>& previous,
                           Millis t);

/// Sum of weight times option value.
double weighted_estimate(const SentimentSnapshot& snap, std::span<const AnswerOption> options);

/// Option with the largest weight, smallest id on ties.
std::uint32_t leading_option(const SentimentSnapshot& snap);

/// Final estimate from the last snapshot (or the decayed mean, see
/// FinalEstimateMode). `half_life` applies to time_decayed only.
///
/// Throws ContractViolation on an empty series.
DeliberationResult finalize(std::span<const SentimentSnapshot> series,
                            std::span<const AnswerOption> options,
                            FinalEstimateMode mode = FinalEstimateMode::last_snapshot,
                            Millis half_life = Millis{60'000});

/// Accumulates the sentiment series of a running session. Operator-side
/// only; nothing here is ever sent to participants.
class SentimentTracker {
 public:
  explicit SentimentTracker(std::vector<AnswerOption> options, Scorer scorer = {});

  /// Scores messages in (t - interval, t] and appends a snapshot.
  const SentimentSnapshot& on_snapshot_due(const Session& session, Millis t);

  const std::vector<SentimentSnapshot>& series() const { return series_; }
  DeliberationResult finalize(FinalEstimateMode mode = FinalEstimateMode::last_snapshot) const;

 private:
  std::vector<AnswerOption> options_;
  Scorer scorer_;
  std::vector<SentimentSnapshot> series_;
};

/// One line per (snapshot, option): {"t":15,"option_id":0,"weight":0.1}.
/// A non-negative `replication` adds a "replication" field first.
void write_series_jsonl(std::ostream& out, std::span<const SentimentSnapshot> series,
                        long replication = -1);

/// Inverse of write_series_jsonl. With a non-negative `replication` only that
/// replication's lines are read. Throws ValidationError on malformed input.
std::vector<SentimentSnapshot> read_series_jsonl(std::istream& in, long replication = -1);

}  // namespace csi
