#include "csi/sentiment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <istream>
#include <ostream>
#include <string>

#include <nlohmann/json.hpp>

#include "csi/errors.hpp"

namespace csi {

RawScores score_window(std::span<const Message> messages, std::span<const AnswerOption> options,
                       const Lexicon& lexicon) {
  return tally_human(messages, options, lexicon).clipped();
}

SentimentSnapshot snapshot(const RawScores& raw, const std::optional<SentimentSnapshot>& previous,
                           Millis t) {
  const double total = std::accumulate(raw.begin(), raw.end(), 0.0);
  if (total > 0.0) {
    SentimentSnapshot s{t, std::vector<double>(raw.size())};
    for (std::size_t i = 0; i < raw.size(); ++i) s.weights[i] = raw[i] / total;
    return s;
  }
  if (previous) return SentimentSnapshot{t, previous->weights};
  if (raw.empty()) throw ContractViolation("snapshot: option set is empty");
  return SentimentSnapshot{t, std::vector<double>(raw.size(), 1.0 / static_cast<double>(raw.size()))};
}

double weighted_estimate(const SentimentSnapshot& snap, std::span<const AnswerOption> options) {
  if (snap.weights.size() != options.size())
    throw ContractViolation("weighted_estimate: snapshot and option set differ in size");
  double estimate = 0.0;
  for (std::size_t i = 0; i < options.size(); ++i) estimate += snap.weights[i] * options[i].value;
  return estimate;
}

std::uint32_t leading_option(const SentimentSnapshot& snap) {
  const auto it = std::max_element(snap.weights.begin(), snap.weights.end());
  return static_cast<std::uint32_t>(std::distance(snap.weights.begin(), it));
}

DeliberationResult finalize(std::span<const SentimentSnapshot> series,
                            std::span<const AnswerOption> options, FinalEstimateMode mode,
                            Millis half_life) {
  if (series.empty()) throw ContractViolation("finalize: sentiment series is empty");
  DeliberationResult r;
  r.series.assign(series.begin(), series.end());
  r.winning_option = leading_option(series.back());
  switch (mode) {
    case FinalEstimateMode::last_snapshot:
      r.final_estimate = weighted_estimate(series.back(), options);
      break;
    case FinalEstimateMode::time_decayed: {
      if (half_life <= Millis{0}) throw ContractViolation("finalize: half_life must be positive");
      const double end = static_cast<double>(series.back().t.count());
      double num = 0.0;
      double den = 0.0;
      for (const auto& s : series) {
        const double age = end - static_cast<double>(s.t.count());
        const double w = std::exp2(-age / static_cast<double>(half_life.count()));
        num += w * weighted_estimate(s, options);
        den += w;
      }
      r.final_estimate = num / den;
      break;
    }
  }
  return r;
}

SentimentTracker::SentimentTracker(std::vector<AnswerOption> options, Scorer scorer)
    : options_(std::move(options)), scorer_(std::move(scorer)) {
  if (!scorer_)
    scorer_ = [](std::span<const Message> m, std::span<const AnswerOption> o) { return score_window(m, o); };
}

const SentimentSnapshot& SentimentTracker::on_snapshot_due(const Session& session, Millis t) {
  const auto window = session.messages_between(t - session.config().snapshot_interval, t);
  std::optional<SentimentSnapshot> previous;
  if (!series_.empty()) previous = series_.back();
  series_.push_back(snapshot(scorer_(window, options_), previous, t));
  return series_.back();
}

DeliberationResult SentimentTracker::finalize(FinalEstimateMode mode) const {
  return csi::finalize(series_, options_, mode);
}

void write_series_jsonl(std::ostream& out, std::span<const SentimentSnapshot> series, long replication) {
  for (const auto& s : series) {
    for (std::size_t o = 0; o < s.weights.size(); ++o) {
      nlohmann::ordered_json line;
      if (replication >= 0) line["replication"] = replication;
      line["t"] = to_seconds(s.t);
      line["option_id"] = o;
      line["weight"] = s.weights[o];
      out << line.dump() << '\n';
    }
  }
}

std::vector<SentimentSnapshot> read_series_jsonl(std::istream& in, long replication) {
  std::vector<SentimentSnapshot> series;
  std::string text;
  std::size_t line_no = 0;
  while (std::getline(in, text)) {
    ++line_no;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto line = nlohmann::json::parse(text);
      if (replication >= 0 && line.value("replication", -1L) != replication) continue;
      const auto t = from_seconds(line.at("t").get<double>());
      const auto option = line.at("option_id").get<std::size_t>();
      if (series.empty() || series.back().t != t) {
        if (option != 0) throw ValidationError("snapshot does not start at option 0");
        series.push_back({t, {}});
      }
      auto& weights = series.back().weights;
      if (option != weights.size()) throw ValidationError("option ids out of order");
      weights.push_back(line.at("weight").get<double>());
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError("series line " + std::to_string(line_no) + ": " + e.what());
    } catch (const ValidationError& e) {
      throw ValidationError("series line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return series;
}

}  // namespace csi
