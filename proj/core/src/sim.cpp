#include "csi/sim.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "csi/counting.hpp"
#include "csi/errors.hpp"
#include "csi/persist.hpp"
#include "csi/serialization.hpp"

namespace csi::sim {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

constexpr std::array kRationales{
    "the jar is tall",
    "the gumballs look small",
    "there is a lot of empty space between them",
    "I counted one layer and multiplied",
    "the jar is wider than it looks",
};

std::string compose(const std::string& label, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> pick_template(0, 3);
  std::uniform_int_distribution<std::size_t> pick_reason(0, kRationales.size() - 1);
  switch (pick_template(rng)) {
    case 0:
      return "I think " + label + " because " + kRationales[pick_reason(rng)];
    case 1:
      return label + " seems right to me";
    case 2:
      return "I'd go with " + label + " since " + kRationales[pick_reason(rng)];
    default:
      return "My guess is " + label;
  }
}

double mean_of(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_sd(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

double population_sd(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size()));
}

}  // namespace

SeedTree SeedTree::child(std::string_view label) const {
  return SeedTree(splitmix64(root_ ^ splitmix64(fnv1a(label))));
}

SeedTree SeedTree::child(std::uint64_t index) const {
  return SeedTree(splitmix64(root_ ^ splitmix64(index ^ 0x5851f42d4c957f2dULL)));
}

std::string_view to_string(AgentKind kind) {
  return kind == AgentKind::independent ? "independent" : "conformist";
}

AgentKind agent_kind_from_string(std::string_view name) {
  if (name == "independent") return AgentKind::independent;
  if (name == "conformist") return AgentKind::conformist;
  throw ConfigError("unknown agent model: " + std::string(name));
}

void validate(const ExperimentSpec& spec) {
  csi::validate(spec.swarm);
  csi::validate(spec.binding);
  const auto& p = spec.population;
  if (p.count < 1) throw ConfigError("population count must be at least 1");
  if (!(p.belief_median > 0.0) || !(p.belief_sigma > 0.0))
    throw ConfigError("belief distribution parameters must be positive");
  if (p.fixed_belief && !(*p.fixed_belief > 0.0)) throw ConfigError("fixed belief must be positive");
  if (!(p.talkativeness >= 0.0 && p.talkativeness <= 1.0))
    throw ConfigError("talkativeness must lie in [0, 1]");
  if (!(p.conform_rate >= 0.0 && p.conform_rate <= 1.0))
    throw ConfigError("conform rate must lie in [0, 1]");
  if (!(spec.truth > 0.0)) throw ConfigError("truth must be positive");
  if (spec.replications < 1) throw ConfigError("replications must be at least 1");
  if (spec.tick <= Millis{0}) throw ConfigError("tick must be positive");
  if (!spec.survey_arm && !spec.csi_arm) throw ConfigError("at least one arm must run");
}

std::vector<AnswerOption> default_options() {
  constexpr std::array<double, 10> values{200, 300, 400, 500, 600, 700, 800, 900, 1100, 1400};
  std::vector<AnswerOption> options;
  for (std::size_t i = 0; i < values.size(); ++i)
    options.push_back({static_cast<std::uint32_t>(i), value_token(values[i]), values[i]});
  return options;
}

std::vector<std::string> participant_ids(std::size_t count) {
  std::vector<std::string> ids;
  ids.reserve(count);
  const auto width = std::max<std::size_t>(4, std::to_string(count).size());
  for (std::size_t i = 1; i <= count; ++i) {
    std::ostringstream s;
    s << 'p' << std::setw(static_cast<int>(width)) << std::setfill('0') << i;
    ids.push_back(s.str());
  }
  return ids;
}

std::vector<double> sample_beliefs(const PopulationSpec& population, const SeedTree& seeds) {
  if (population.fixed_belief) return std::vector<double>(population.count, *population.fixed_belief);
  std::mt19937_64 rng(seeds.child("beliefs").root());
  std::lognormal_distribution<double> dist(std::log(population.belief_median), population.belief_sigma);
  std::vector<double> beliefs(population.count);
  for (auto& b : beliefs) b = dist(rng);
  return beliefs;
}

SurveyResult run_survey(const std::vector<AnswerOption>& options,
                        const std::vector<std::string>& participants,
                        const std::vector<double>& beliefs) {
  SurveyResult survey(options);
  for (std::size_t i = 0; i < participants.size(); ++i)
    survey.record(participants[i], nearest_option(options, beliefs[i]));
  return survey;
}

CsiRun run_csi(const ExperimentSpec& spec, const std::vector<std::string>& participants,
               const std::vector<double>& beliefs, const SeedTree& seeds) {
  SwarmConfig config = spec.swarm;
  config.seed = seeds.child("partition").root();
  Session session(config, participants);
  const auto& options = session.config().options;

  ObserverRelay relay(session.room_count(), spec.binding);
  SentimentTracker tracker(options);

  std::vector<AgentModel> agents(participants.size());
  for (std::size_t i = 0; i < agents.size(); ++i)
    agents[i] = {spec.population.kind, beliefs[i], spec.population.talkativeness, spec.population.conform_rate};
  const auto members = session.plan().members();

  CsiRun run;
  const auto on_event = [&](const DueEvent& e) {
    switch (e.kind) {
      case DueEvent::Kind::relay_due:
        // One synchronous round per relay instant; room 0 leads the batch.
        if (e.room == 0) {
          relay.relay_round(session);
          run.relay_round_times.push_back(e.t);
        }
        break;
      case DueEvent::Kind::snapshot_due:
        tracker.on_snapshot_due(session, e.t);
        break;
      case DueEvent::Kind::session_end:
        break;
    }
  };

  std::mt19937_64 rng(seeds.child("behavior").root());
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::uint64_t> heard(session.room_count(), 0);

  while (session.phase() == Phase::open) {
    const auto events = session.advance_clock(spec.tick, on_event);
    run.events.insert(run.events.end(), events.begin(), events.end());
    if (session.phase() == Phase::closed) break;

    for (std::size_t room = 0; room < session.room_count(); ++room) {
      const auto window = session.transcript_window(room, heard[room]);
      if (window.empty()) continue;
      heard[room] = window.back().seq + 1;
      const auto weights = tally_messages(window, options).clipped();
      const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
      if (total <= 0.0) continue;
      double mentioned = 0.0;
      for (std::size_t o = 0; o < options.size(); ++o) mentioned += weights[o] * options[o].value;
      mentioned /= total;
      for (auto p : members[room]) {
        auto& a = agents[p];
        if (a.kind == AgentKind::conformist)
          a.belief = (1.0 - a.conform_rate) * a.belief + a.conform_rate * mentioned;
      }
    }

    for (std::size_t p = 0; p < agents.size(); ++p) {
      if (unit(rng) >= agents[p].talkativeness) continue;
      const auto& option = options[nearest_option(options, agents[p].belief)];
      session.post_message(session.plan().assignments[p], HumanAuthor{participants[p]},
                           compose(option.label, rng));
    }
  }

  run.config = session.config();
  run.participants = participants;
  run.plan = session.plan();
  run.topology = session.topology();
  for (std::size_t room = 0; room < session.room_count(); ++room)
    run.transcripts.push_back(session.transcript(room));
  run.result = tracker.finalize();
  return run;
}

ExperimentReport run_experiment(const ExperimentSpec& spec) {
  validate(spec);
  ExperimentReport report;
  report.spec = spec;
  const SeedTree root(spec.seed);
  const auto participants = participant_ids(spec.population.count);

  std::vector<double> individuals;
  std::vector<double> woc;
  std::vector<double> csi;
  for (std::size_t rep = 0; rep < spec.replications; ++rep) {
    const auto seeds = root.child(rep);
    ReplicationResult r;
    r.index = rep;
    r.seed = seeds.root();
    r.beliefs = sample_beliefs(spec.population, seeds);
    if (spec.survey_arm) r.survey = run_survey(spec.swarm.options, participants, r.beliefs);
    if (spec.csi_arm) r.csi = run_csi(spec, participants, r.beliefs, seeds);
    r.report = error_report(spec.truth, r.survey ? &*r.survey : nullptr, r.csi ? &r.csi->result : nullptr);
    if (r.report.mae_individuals) individuals.push_back(*r.report.mae_individuals);
    if (r.report.woc_abs_error) woc.push_back(*r.report.woc_abs_error);
    if (r.report.csi_abs_error) csi.push_back(*r.report.csi_abs_error);
    report.replications.push_back(std::move(r));
  }

  const auto summarize = [&](const char* name, const std::vector<double>& v) {
    if (!v.empty()) report.summary.push_back({name, v.size(), mean_of(v), sample_sd(v)});
  };
  summarize("individuals", individuals);
  summarize("woc", woc);
  summarize("csi", csi);
  return report;
}

std::vector<double> convergence_curve(const CsiRun& run) {
  const auto& options = run.config.options;
  const std::size_t rooms = run.transcripts.size();
  std::vector<std::optional<std::uint32_t>> leader(rooms);
  std::vector<std::size_t> cursor(rooms, 0);
  std::vector<double> curve;
  for (const auto round_t : run.relay_round_times) {
    for (std::size_t room = 0; room < rooms; ++room) {
      const auto& transcript = run.transcripts[room];
      std::vector<Message> window;
      while (cursor[room] < transcript.size() && transcript[cursor[room]].t <= round_t)
        window.push_back(transcript[cursor[room]++]);
      const auto weights = tally_echo_damped(window, options).clipped();
      const auto best = std::max_element(weights.begin(), weights.end());
      if (best != weights.end() && *best > 0.0)
        leader[room] = static_cast<std::uint32_t>(std::distance(weights.begin(), best));
    }
    std::vector<double> values;
    for (const auto& l : leader)
      if (l) values.push_back(options[*l].value);
    curve.push_back(population_sd(values));
  }
  return curve;
}

std::string format_summary(const ExperimentReport& report) {
  const auto& spec = report.spec;
  std::ostringstream out;
  out << "agents: " << spec.population.count << " (" << to_string(spec.population.kind)
      << ", talkativeness " << spec.population.talkativeness << ", alpha " << spec.population.conform_rate
      << ")\n";
  out << "truth: " << spec.truth << "  replications: " << spec.replications << "  seed: " << spec.seed << "\n";
  if (!report.replications.empty() && report.replications.front().csi) {
    const auto& run = *report.replications.front().csi;
    out << "rooms: " << run.plan.room_count() << "  snapshots: " << run.result.series.size()
        << "  relay rounds: " << run.relay_round_times.size() << "\n";
  }
  out << "\n"
      << std::left << std::setw(14) << "method" << std::right << std::setw(6) << "n" << std::setw(16)
      << "mean abs error" << std::setw(12) << "sd" << std::setw(10) << "error" << "\n";
  for (const auto& arm : report.summary) {
    out << std::left << std::setw(14) << arm.method << std::right << std::setw(6) << arm.n << std::fixed
        << std::setprecision(1) << std::setw(16) << arm.mean_abs_error << std::setw(12) << arm.sd_abs_error
        << std::setprecision(0) << std::setw(9) << std::round(100.0 * arm.mean_abs_error / spec.truth)
        << "%\n";
    out.unsetf(std::ios::fixed);
    out << std::setprecision(6);
  }
  for (const auto& r : report.replications) {
    if (!r.csi) continue;
    out << "\nreplication " << r.index << " room dispersion per relay round"
        << " (behaviour of the synthetic agent model):";
    for (double d : convergence_curve(*r.csi)) out << ' ' << std::fixed << std::setprecision(1) << d;
    out.unsetf(std::ios::fixed);
    out << std::setprecision(6) << "\n";
  }
  return out.str();
}

void write_outputs(const ExperimentReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ostringstream reports;
  std::ostringstream series;
  for (const auto& r : report.replications) {
    nlohmann::ordered_json line;
    line["replication"] = r.index;
    line["seed"] = r.seed;
    if (r.csi) {
      line["rooms"] = r.csi->plan.room_count();
      line["snapshots"] = r.csi->result.series.size();
      line["relay_rounds"] = r.csi->relay_round_times.size();
      line["winning_option"] = r.csi->result.winning_option;
    }
    const nlohmann::json fields = r.report;
    for (const auto& [key, value] : fields.items()) line[key] = value;
    reports << line.dump() << '\n';
    if (!r.csi) continue;
    write_series_jsonl(series, r.csi->result.series, static_cast<long>(r.index));
    for (std::size_t room = 0; room < r.csi->transcripts.size(); ++room) {
      std::string text;
      for (const auto& m : r.csi->transcripts[room]) text += transcript_line(m) + '\n';
      write_file_atomic(dir / ("transcript-" + std::to_string(r.index) + "-" + std::to_string(room) + ".jsonl"),
                        text);
    }
  }
  write_file_atomic(dir / "report.jsonl", reports.str());
  write_file_atomic(dir / "series.jsonl", series.str());
  write_file_atomic(dir / "summary.txt", format_summary(report));
}

}  // namespace csi::sim
