// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/special_functions/erf.hpp>
#include <boost/multiprecision/cpp_dec_float.hpp>

#include "csi/counting.hpp"
#include "csi/persist.hpp"
#include "csi/relay.hpp"
#include "csi/sentiment.hpp"
#include "csi/session.hpp"
#include "csi/serialization.hpp"
#include "csi/sim.hpp"
#include "csi/survey.hpp"
#include "csi/topology.hpp"
#include "fixtures.hpp"
#include "random_session.hpp"

namespace fs = std::filesystem;
namespace sim = csi::sim;
using csi::Millis;
using Clock = std::chrono::steady_clock;

namespace {

// Collects the first few reasons a criterion failed.
struct Check {
  std::vector<std::string> failures;
  std::string detail;
  void expect(bool ok, const std::string& what) {
    if (!ok && failures.size() < 5) failures.push_back(what);
    if (!ok && failures.size() == 5) failures.push_back("...");
  }
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

Check partition_conformance() {
  Check c;
  const auto start = Clock::now();
  const auto p241 = csi::partition(241, 5, 6, 1);
  std::map<std::size_t, std::size_t> sizes;
  for (auto s : p241.group_sizes) ++sizes[s];
  c.expect(p241.room_count() == 47, "241 -> " + std::to_string(p241.room_count()) + " rooms");
  c.expect(sizes == std::map<std::size_t, std::size_t>{{5, 41}, {6, 6}}, "241 sizes are not 41x5 + 6x6");
  c.expect(csi::partition(400, 5, 5, 1).room_count() == 80, "400 at (5,5) is not 80 rooms");

  for (std::size_t n = 1; n <= 10000; ++n) {
    const auto plan = csi::partition(n, 5, 6, n);
    const auto total = std::accumulate(plan.group_sizes.begin(), plan.group_sizes.end(), std::size_t{0});
    bool ok = plan.assignments.size() == n && total == n && !plan.group_sizes.empty();
    std::vector<std::size_t> counted(plan.group_sizes.size(), 0);
    for (auto room : plan.assignments) {
      if (room >= counted.size()) {
        ok = false;
        break;
      }
      ++counted[room];
    }
    ok = ok && counted == plan.group_sizes;
    if (n < 5)
      ok = ok && plan.room_count() == 1;
    else if (csi::partition_feasible(n, 5, 6))
      ok = ok && std::all_of(plan.group_sizes.begin(), plan.group_sizes.end(),
                             [](std::size_t s) { return s >= 5 && s <= 6; });
    else
      ok = ok && std::all_of(plan.group_sizes.begin(), plan.group_sizes.end(), [](std::size_t s) { return s >= 5; });
    c.expect(ok, "invariants broken at n=" + std::to_string(n));
  }
  const double elapsed = seconds_since(start);
  c.expect(elapsed < 1.0, "took " + std::to_string(elapsed) + " s");
  std::ostringstream d;
  d << "47 rooms {41x5, 6x6}; 80 rooms; n in [1,10000] in " << elapsed << " s";
  c.detail = d.str();
  return c;
}

csi::DeliberationResult csi_at(double estimate) { return {{}, estimate, 0}; }

Check recorded_percentages() {
  Check c;
  const double truth = 380.0 + 279.0;
  // Survey answers 135 and 857 sit 524 and 198 from the truth; their mean error is 361.
  const std::vector<csi::AnswerOption> options{{0, "135", 135}, {1, "380", 380}, {2, "577", 577}, {3, "857", 857}};
  csi::SurveyResult survey(options);
  survey.record("a", 0);
  survey.record("b", 3);
  const auto r = csi::error_report(truth, survey, csi_at(truth - 82), truth - 279);
  c.expect(*r.mae_individuals == 361 && *r.baseline_abs_error == 279 && *r.woc_abs_error == 163 &&
               *r.csi_abs_error == 82,
           "absolute errors do not come out as 361/279/163/82");
  const std::pair<double, double> pairs[] = {
      {*r.mae_individuals_pct, 55}, {*r.baseline_pct, 42}, {*r.woc_pct, 25}, {*r.csi_pct, 12}};
  std::ostringstream d;
  for (const auto& [got, recorded] : pairs) {
    c.expect(std::abs(got * 100 - recorded) <= 1.0,
             std::to_string(got * 100) + "% vs recorded " + std::to_string(recorded) + "%");
    d << std::lround(got * 1000) / 10.0 << "% ";
  }
  c.detail = d.str() + "vs 55/42/25/12";
  return c;
}

bool mentions(const std::vector<csi::Message>& transcript, const std::string& token) {
  for (const auto& m : transcript)
    for (const auto& t : csi::tokenize(m.text))
      if (t.text == token) return true;
  return false;
}

Check ring_propagation() {
  Check c;
  const auto start = Clock::now();
  constexpr std::size_t rooms = 47;
  auto config = csi::test::default_config(3);
  config.max_size = 5;
  csi::Session s(config, csi::test::ids(rooms * 5));
  c.expect(s.room_count() == rooms, "session has " + std::to_string(s.room_count()) + " rooms");
  csi::ObserverRelay relay(rooms);
  for (const auto& who : s.room_members(0)) s.post_message(0, csi::HumanAuthor{who}, "720");
  for (std::size_t k = 1; k < rooms; ++k) {
    relay.relay_round(s);
    for (std::size_t r = 1; r < rooms; ++r)
      c.expect(mentions(s.transcript(r), "720") == (r <= k),
               "round " + std::to_string(k) + " room " + std::to_string(r));
  }
  std::size_t reached = 0;
  for (std::size_t r = 0; r < rooms; ++r) reached += mentions(s.transcript(r), "720");
  c.expect(reached == rooms, std::to_string(reached) + " rooms reached after 46 rounds");
  const double elapsed = seconds_since(start);
  c.expect(elapsed < 1.0, "took " + std::to_string(elapsed) + " s");
  c.detail = std::to_string(reached) + "/47 rooms after 46 rounds, rooms 1..k after k";
  return c;
}

sim::ExperimentSpec sim_defaults(std::uint64_t seed) {
  sim::ExperimentSpec spec;
  spec.swarm.options = sim::default_options();
  spec.truth = 659;
  spec.seed = seed;
  return spec;
}

Check aggregation_oracle() {
  Check c;
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> unit(0.0, 1.0), value(1.0, 5000.0);
  double worst = 0;
  for (int i = 0; i < 1000; ++i) {
    std::vector<csi::AnswerOption> options;
    csi::RawScores raw(10);
    for (std::uint32_t k = 0; k < 10; ++k) {
      options.push_back({k, std::to_string(k), value(rng)});
      raw[k] = unit(rng);
    }
    const auto snap = csi::snapshot(raw, std::nullopt, Millis{0});
    long double oracle = 0;
    for (std::size_t k = 0; k < 10; ++k) oracle += static_cast<long double>(snap.weights[k]) * options[k].value;
    const double diff = std::abs(csi::weighted_estimate(snap, options) - static_cast<double>(oracle));
    worst = std::max(worst, diff);
    c.expect(diff <= 1e-9, "case " + std::to_string(i) + " differs by " + std::to_string(diff));
  }
  std::size_t snapshots = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto spec = sim_defaults(seed);
    spec.replications = 2;
    for (const auto& rep : sim::run_experiment(spec).replications)
      for (const auto& snap : rep.csi->result.series) {
        ++snapshots;
        const double sum = std::accumulate(snap.weights.begin(), snap.weights.end(), 0.0);
        c.expect(std::abs(sum - 1.0) <= 1e-9, "snapshot sums to " + std::to_string(sum));
      }
  }
  std::ostringstream d;
  d << "max |diff| " << worst << " over 1000; " << snapshots << " simulated snapshots sum to 1";
  c.detail = d.str();
  return c;
}

using big = boost::multiprecision::cpp_dec_float_50;

big reference_p(const std::vector<double>& errors, double csi_error) {
  const big n = static_cast<long>(errors.size());
  big sum = 0;
  for (double e : errors) sum += big(e);
  const big mean = sum / n;
  big ss = 0;
  for (double e : errors) ss += (big(e) - mean) * (big(e) - mean);
  const big z = (mean - big(csi_error)) / (boost::multiprecision::sqrt(ss / (n - 1)) / boost::multiprecision::sqrt(n));
  return boost::math::erfc(z / boost::multiprecision::sqrt(big(2))) / 2;
}

Check z_oracle() {
  Check c;
  std::mt19937_64 rng(100);
  double worst = 0;
  for (int i = 0; i < 100; ++i) {
    const std::size_t n = 2 + rng() % 400;
    std::lognormal_distribution<double> err(std::log(300.0), 0.6);
    std::vector<double> errors(n);
    for (auto& e : errors) e = err(rng);
    const double mean = std::accumulate(errors.begin(), errors.end(), 0.0) / static_cast<double>(n);
    const double csi_error = mean * std::uniform_real_distribution<double>(0.7, 1.05)(rng);
    const double diff =
        std::abs(csi::one_tailed_z(errors, csi_error).p - reference_p(errors, csi_error).convert_to<double>());
    worst = std::max(worst, diff);
    c.expect(diff <= 1e-6, "fixture " + std::to_string(i) + " p differs by " + std::to_string(diff));
  }
  // 241 errors with mean 361 and sample sd 300.
  std::vector<double> scaled(120, 661.0);
  scaled.insert(scaled.end(), 120, 61.0);
  scaled.push_back(361.0);
  const auto r = csi::one_tailed_z(scaled, 82.0);
  c.expect(r.z > 0 && r.p < 0.001, "scaled fixture p = " + std::to_string(r.p));
  std::ostringstream d;
  d << "max |dp| " << worst << " over 100; scaled fixture z=" << r.z << " p=" << r.p;
  c.detail = d.str();
  return c;
}

std::string slurp_dir(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::string all;
  for (const auto& f : files) {
    std::ifstream in(f, std::ios::binary);
    all += f.filename().string() + "\n" + std::string(std::istreambuf_iterator<char>(in), {});
  }
  return all;
}

Check end_to_end_determinism() {
  Check c;
  const auto root = fs::temp_directory_path() / "csi_acceptance_sim";
  fs::remove_all(root);
  std::string outputs[2];
  double elapsed = 0;
  for (int run = 0; run < 2; ++run) {
    auto spec = sim_defaults(7);
    spec.population.count = 241;
    spec.population.kind = sim::AgentKind::conformist;
    const auto start = Clock::now();
    const auto report = sim::run_experiment(spec);
    elapsed = std::max(elapsed, seconds_since(start));
    const auto& run_csi = *report.replications.at(0).csi;
    c.expect(run_csi.plan.room_count() == 47, "rooms " + std::to_string(run_csi.plan.room_count()));
    c.expect(run_csi.result.series.size() == 16, "snapshots " + std::to_string(run_csi.result.series.size()));
    c.expect(run_csi.relay_round_times.size() == 8, "relay rounds " + std::to_string(run_csi.relay_round_times.size()));
    const auto dir = root / std::to_string(run);
    sim::write_outputs(report, dir);
    outputs[run] = slurp_dir(dir);
    for (const char* name : {"report.jsonl", "series.jsonl", "transcript-0-0.jsonl"})
      c.expect(fs::exists(dir / name), std::string("missing ") + name);
  }
  c.expect(elapsed < 10.0, "took " + std::to_string(elapsed) + " s");
  c.expect(!outputs[0].empty() && outputs[0] == outputs[1], "outputs differ between runs");
  fs::remove_all(root);
  std::ostringstream d;
  d << "47 rooms, 16 snapshots, 8 relay rounds in " << elapsed << " s; outputs byte-identical ("
    << outputs[0].size() << " bytes)";
  c.detail = d.str();
  return c;
}

struct Ensemble {
  int decreased = 0;
  double mean_change = 0;
  double se_change = 0;
};

Ensemble ensemble(double alpha) {
  Ensemble e;
  std::vector<double> changes;
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    auto spec = sim_defaults(seed);
    spec.population.count = 50;
    spec.population.conform_rate = alpha;
    spec.survey_arm = false;
    const auto curve = sim::convergence_curve(*sim::run_experiment(spec).replications[0].csi);
    if (curve.empty()) continue;
    if (curve.back() < curve.front()) ++e.decreased;
    changes.push_back(curve.back() - curve.front());
  }
  const double n = static_cast<double>(changes.size());
  e.mean_change = std::accumulate(changes.begin(), changes.end(), 0.0) / n;
  double ss = 0;
  for (double x : changes) ss += (x - e.mean_change) * (x - e.mean_change);
  e.se_change = std::sqrt(ss / (n - 1)) / std::sqrt(n);
  return e;
}

Check convergence() {
  Check c;
  const auto conforming = ensemble(0.5);
  const auto independent = ensemble(0.0);
  c.expect(conforming.decreased >= 27, "alpha=0.5 decreased in " + std::to_string(conforming.decreased) + "/30");
  // No systematic decrease: neither the sign count nor the mean change says so.
  c.expect(independent.decreased < 27, "alpha=0 decreased in " + std::to_string(independent.decreased) + "/30");
  c.expect(independent.mean_change > -2.5 * independent.se_change,
           "alpha=0 mean change " + std::to_string(independent.mean_change) + " is significantly negative");
  std::ostringstream d;
  d << "model property: alpha=0.5 " << conforming.decreased << "/30 decreased (mean change "
    << conforming.mean_change << "); alpha=0 " << independent.decreased << "/30 (mean change "
    << independent.mean_change << " +/- " << independent.se_change << ")";
  c.detail = d.str();
  return c;
}

Check persistence_round_trip() {
  Check c;
  const auto root = fs::temp_directory_path() / "csi_acceptance_persist";
  fs::remove_all(root);
  std::size_t messages = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto s = csi::test::random_closed_session(seed);
    const auto dir = root / std::to_string(seed);
    csi::persist(*s, dir);
    const auto loaded = csi::reload(dir);
    c.expect(loaded.transcripts.size() == s->room_count(), "room count differs for seed " + std::to_string(seed));
    for (std::size_t room = 0; room < std::min(loaded.transcripts.size(), s->room_count()); ++room) {
      std::string original, reloaded;
      for (const auto& m : s->transcript(room)) original += csi::transcript_line(m) + "\n";
      for (const auto& m : loaded.transcripts[room]) reloaded += csi::transcript_line(m) + "\n";
      std::ifstream in(dir / ("transcript-" + std::to_string(room) + ".jsonl"), std::ios::binary);
      const std::string on_disk(std::istreambuf_iterator<char>(in), {});
      c.expect(original == reloaded && original == on_disk,
               "seed " + std::to_string(seed) + " room " + std::to_string(room) + " differs");
      messages += s->transcript(room).size();
    }
  }
  fs::remove_all(root);
  c.detail = "20 sessions, " + std::to_string(messages) + " messages identical after reload";
  return c;
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Check()>> criteria[] = {
      {"partition conformance", partition_conformance},
      {"recorded error percentages", recorded_percentages},
      {"ring propagation bound", ring_propagation},
      {"aggregation oracle", aggregation_oracle},
      {"z-test oracle", z_oracle},
      {"end-to-end determinism", end_to_end_determinism},
      {"convergence of the agent model", convergence},
      {"persistence round trip", persistence_round_trip},
  };
  int failed = 0;
  int index = 1;
  for (const auto& [name, run] : criteria) {
    Check c;
    try {
      c = run();
    } catch (const std::exception& e) {
      c.failures.push_back(std::string("exception: ") + e.what());
    }
    const bool ok = c.failures.empty();
    failed += !ok;
    std::printf("%s %d %s: %s\n", ok ? "PASS" : "FAIL", index++, name, c.detail.c_str());
    for (const auto& f : c.failures) std::printf("    %s\n", f.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(std::size(criteria)) - failed, std::size(criteria));
  return failed == 0 ? 0 : 1;
}
