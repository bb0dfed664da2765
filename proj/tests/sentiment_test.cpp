#include <gtest/gtest.h>

#include <numeric>
#include <random>
#include <sstream>

#include "csi/errors.hpp"
#include "csi/relay.hpp"
#include "csi/sentiment.hpp"
#include "fixtures.hpp"

using csi::Millis;
using csi::SentimentSnapshot;
using csi::test::id_of;
using csi::test::jar_options;

namespace {

std::vector<csi::AnswerOption> two_options(double a, double b) {
  return {{0, "A", a}, {1, "B", b}};
}

std::vector<csi::Message> humans(std::initializer_list<const char*> texts) {
  std::vector<csi::Message> out;
  for (const char* t : texts) out.push_back({out.size(), 0, csi::HumanAuthor{"h"}, t, {}});
  return out;
}

SentimentSnapshot random_snapshot(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  csi::RawScores raw(n);
  for (auto& r : raw) r = u(rng);
  return csi::snapshot(raw, std::nullopt, Millis{0});
}

}  // namespace

TEST(ScoreWindow, Examples) {
  const auto options = jar_options();
  const auto raw = csi::score_window(humans({"720 because tall", "I doubt 720", "500"}), options);
  EXPECT_EQ(raw[id_of(options, 720)], 0.0);
  EXPECT_EQ(raw[id_of(options, 500)], 1.0);

  const auto silent = csi::score_window(humans({"hello", "what do we think"}), options);
  EXPECT_EQ(silent, csi::RawScores(10, 0.0));

  const auto three = csi::score_window(humans({"720", "720!", "really, 720"}), options);
  csi::RawScores expected(10, 0.0);
  expected[id_of(options, 720)] = 3.0;
  EXPECT_EQ(three, expected);
}

TEST(ScoreWindow, ObserverMessagesAreNotScored) {
  const auto options = jar_options();
  std::vector<csi::Message> w{{0, 1, csi::ObserverAuthor{0}, "most support is for 900", {}}};
  EXPECT_EQ(csi::score_window(w, options), csi::RawScores(10, 0.0));
}

// The scorer and the distiller count with the same rules: on human-only
// windows the distiller's positive weights are the scorer's raw scores.
TEST(ScoreWindow, AgreesWithDistillerOnSharedCorpus) {
  const auto options = jar_options();
  const std::vector<std::vector<csi::Message>> corpus{
      humans({"I think 720 because the jar is tall", "720 seems right", "maybe 500"}),
      humans({"I doubt 720", "720 because it's huge"}),
      humans({"not 300, 400", "too high: 1100", "1,100 is too high", "I'd go 900. No 800"}),
      humans({"659 since the jar is deep; 659", "don\xE2\x80\x99t say 200", "200 200 200"}),
      humans({"nothing numeric here"}),
  };
  for (const auto& w : corpus) {
    const auto raw = csi::score_window(w, options);
    const auto d = csi::distill_mock(w, options);
    csi::RawScores from_distill(options.size(), 0.0);
    for (const auto& r : d.top_options) from_distill[r.option] = r.weight;
    EXPECT_EQ(raw, from_distill);
    EXPECT_EQ(d.empty, std::accumulate(raw.begin(), raw.end(), 0.0) == 0.0);
  }
}

TEST(Snapshot, Normalizes) {
  const auto s = csi::snapshot({3, 1}, std::nullopt, Millis{15000});
  EXPECT_EQ(s.t, Millis{15000});
  EXPECT_DOUBLE_EQ(s.weights[0], 0.75);
  EXPECT_DOUBLE_EQ(s.weights[1], 0.25);
}

TEST(Snapshot, CarriesForwardOrGoesUniform) {
  const SentimentSnapshot prev{Millis{15000}, {0.6, 0.4}};
  const auto carried = csi::snapshot({0, 0}, prev, Millis{30000});
  EXPECT_EQ(carried.weights, prev.weights);
  EXPECT_EQ(carried.t, Millis{30000});
  const auto uniform = csi::snapshot(csi::RawScores(10, 0.0), std::nullopt, Millis{15000});
  for (double w : uniform.weights) EXPECT_DOUBLE_EQ(w, 0.1);
}

TEST(Snapshot, AlwaysSumsToOne) {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 1000; ++i) {
    const auto s = random_snapshot(rng, 10);
    EXPECT_NEAR(std::accumulate(s.weights.begin(), s.weights.end(), 0.0), 1.0, 1e-9);
    for (double w : s.weights) EXPECT_GE(w, 0.0);
  }
}

TEST(WeightedEstimate, Examples) {
  const auto options = jar_options();
  SentimentSnapshot all{Millis{0}, csi::RawScores(10, 0.0)};
  all.weights[id_of(options, 659)] = 1.0;
  EXPECT_DOUBLE_EQ(csi::weighted_estimate(all, options), 659.0);
  EXPECT_DOUBLE_EQ(csi::weighted_estimate({Millis{0}, {0.5, 0.5}}, two_options(100, 200)), 150.0);
  EXPECT_THROW(csi::weighted_estimate({Millis{0}, {1.0}}, options), csi::ContractViolation);
}

TEST(WeightedEstimate, MatchesDotProductOracle) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> value(1.0, 5000.0);
  for (int i = 0; i < 1000; ++i) {
    std::vector<csi::AnswerOption> options;
    for (std::uint32_t k = 0; k < 10; ++k) options.push_back({k, std::to_string(k), value(rng)});
    const auto s = random_snapshot(rng, 10);
    long double oracle = 0;
    for (std::size_t k = 0; k < 10; ++k) oracle += static_cast<long double>(s.weights[k]) * options[k].value;
    EXPECT_NEAR(csi::weighted_estimate(s, options), static_cast<double>(oracle), 1e-9);
  }
}

TEST(WeightedEstimate, MonotoneInTopValuedWeight) {
  std::mt19937_64 rng(5);
  const auto options = jar_options();  // ascending values, top is the last id
  for (int i = 0; i < 200; ++i) {
    auto s = random_snapshot(rng, 10);
    double previous = csi::weighted_estimate(s, options);
    for (int step = 0; step < 5; ++step) {
      auto raw = s.weights;
      raw.back() += 0.1;
      s = csi::snapshot(raw, std::nullopt, Millis{0});
      const double now = csi::weighted_estimate(s, options);
      EXPECT_GE(now, previous - 1e-12);
      previous = now;
    }
  }
}

TEST(Finalize, UsesLastSnapshot) {
  const auto options = jar_options();
  SentimentSnapshot only{Millis{15000}, csi::RawScores(10, 0.0)};
  only.weights[id_of(options, 720)] = 1.0;
  const auto r = csi::finalize(std::vector{only}, options);
  EXPECT_DOUBLE_EQ(r.final_estimate, 720.0);
  EXPECT_EQ(r.winning_option, id_of(options, 720));

  std::mt19937_64 rng(8);
  std::vector<SentimentSnapshot> series;
  for (int k = 1; k <= 16; ++k) {
    auto s = random_snapshot(rng, 10);
    s.t = Millis{15000 * k};
    series.push_back(s);
  }
  series.back().weights = csi::snapshot({0, 0, 0, 5, 1, 0, 0, 0, 0, 0}, std::nullopt, Millis{0}).weights;
  const auto full = csi::finalize(series, options);
  EXPECT_DOUBLE_EQ(full.final_estimate, csi::weighted_estimate(series[15], options));
  EXPECT_EQ(full.winning_option, id_of(options, 500));
  EXPECT_EQ(full.series, series);
  EXPECT_GE(full.final_estimate, 200.0);
  EXPECT_LE(full.final_estimate, 1100.0);
}

TEST(Finalize, TiesGoToSmallestId) {
  const auto r = csi::finalize(std::vector<SentimentSnapshot>{{Millis{0}, {0.4, 0.4, 0.2}}},
                               std::vector<csi::AnswerOption>{{0, "a", 1}, {1, "b", 2}, {2, "c", 3}});
  EXPECT_EQ(r.winning_option, 0u);
}

TEST(Finalize, EmptySeriesIsAContractViolation) {
  EXPECT_THROW(csi::finalize(std::vector<SentimentSnapshot>{}, jar_options()), csi::ContractViolation);
}

TEST(Finalize, TimeDecayedWeighsRecentSnapshots) {
  const auto options = two_options(100, 200);
  const std::vector<SentimentSnapshot> series{{Millis{0}, {1.0, 0.0}}, {Millis{60000}, {0.0, 1.0}}};
  const auto r = csi::finalize(series, options, csi::FinalEstimateMode::time_decayed, Millis{60000});
  // Weights 1/2 and 1 on estimates 100 and 200.
  EXPECT_NEAR(r.final_estimate, (0.5 * 100 + 200) / 1.5, 1e-12);
  EXPECT_EQ(r.winning_option, 1u);
}

TEST(Tracker, SeriesFromSession) {
  using csi::Session;
  auto c = csi::test::default_config();
  Session s(c, csi::test::ids(10));
  csi::SentimentTracker tracker(c.options);
  const auto a = s.room_members(0)[0];
  const auto b = s.room_members(1)[0];
  s.post_message(0, csi::HumanAuthor{a}, "720 because tall");
  s.post_message(1, csi::HumanAuthor{b}, "500 and 720");
  s.advance_clock(Millis{240000}, [&](const csi::DueEvent& e) {
    if (e.kind == csi::DueEvent::Kind::snapshot_due) tracker.on_snapshot_due(s, e.t);
  });
  const auto& series = tracker.series();
  ASSERT_EQ(series.size(), 16u);
  for (std::size_t k = 0; k < series.size(); ++k) {
    EXPECT_EQ(series[k].t, Millis{15000 * static_cast<long>(k + 1)});
    EXPECT_NEAR(std::accumulate(series[k].weights.begin(), series[k].weights.end(), 0.0), 1.0, 1e-9);
  }
  // Messages at t = 0 fall in (-15, 0], before the first window (0, 15].
  for (double w : series[0].weights) EXPECT_DOUBLE_EQ(w, 0.1);
}

TEST(Tracker, WindowIsHalfOpen) {
  using csi::Session;
  auto c = csi::test::default_config();
  Session s(c, csi::test::ids(10));
  csi::SentimentTracker tracker(c.options);
  const auto a = s.room_members(0)[0];
  s.advance_clock(Millis{1000});
  s.post_message(0, csi::HumanAuthor{a}, "720");
  s.advance_clock(Millis{14000}, [&](const csi::DueEvent& e) {
    if (e.kind == csi::DueEvent::Kind::snapshot_due) {
      s.post_message(0, csi::HumanAuthor{a}, "500");  // lands at t = 15, inside (0, 15]
      tracker.on_snapshot_due(s, e.t);
    }
  });
  ASSERT_EQ(tracker.series().size(), 1u);
  EXPECT_DOUBLE_EQ(tracker.series()[0].weights[id_of(c.options, 720)], 0.5);
  EXPECT_DOUBLE_EQ(tracker.series()[0].weights[id_of(c.options, 500)], 0.5);
  s.advance_clock(Millis{15000}, [&](const csi::DueEvent& e) {
    if (e.kind == csi::DueEvent::Kind::snapshot_due) tracker.on_snapshot_due(s, e.t);
  });
  // Silent interval carries the previous weights.
  EXPECT_EQ(tracker.series()[1].weights, tracker.series()[0].weights);
}

TEST(Series, JsonlRoundTrip) {
  std::mt19937_64 rng(1);
  std::vector<SentimentSnapshot> series;
  for (int k = 1; k <= 4; ++k) {
    auto s = random_snapshot(rng, 10);
    s.t = Millis{15000 * k};
    series.push_back(s);
  }
  std::stringstream plain;
  csi::write_series_jsonl(plain, series);
  std::string first;
  std::getline(plain, first);
  EXPECT_EQ(first.rfind(R"({"t":15.0,"option_id":0,"weight":)", 0), 0u);
  plain.seekg(0);
  EXPECT_EQ(csi::read_series_jsonl(plain), series);

  std::stringstream tagged;
  csi::write_series_jsonl(tagged, series, 0);
  csi::write_series_jsonl(tagged, std::vector<SentimentSnapshot>(series.begin(), series.begin() + 2), 1);
  EXPECT_EQ(csi::read_series_jsonl(tagged, 1).size(), 2u);
  tagged.clear();
  tagged.seekg(0);
  EXPECT_EQ(csi::read_series_jsonl(tagged, 0), series);

  std::stringstream bad(R"({"t":15,"option_id":1,"weight":1})");
  EXPECT_THROW(csi::read_series_jsonl(bad), csi::ValidationError);
}
