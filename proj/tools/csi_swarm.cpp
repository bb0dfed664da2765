// csi-swarm: simulation driver, error report and live gateway.

#include <csignal>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "csi/errors.hpp"
#include "csi/gateway/server.hpp"
#include "csi/persist.hpp"
#include "csi/sentiment.hpp"
#include "csi/serialization.hpp"
#include "csi/sim.hpp"
#include "csi/survey.hpp"

namespace {

struct SimArgs {
  std::size_t agents = 241;
  std::size_t group_min = 5;
  std::size_t group_max = 6;
  double duration_s = 240;
  double relay_s = 30;
  double snapshot_s = 15;
  double tick_s = 1;
  std::string options_file;
  double truth = 0;
  std::string model = "conformist";
  double alpha = 0.5;
  double talkativeness = 0.05;
  double belief_median = 500;
  double belief_sigma = 0.5;
  std::uint64_t seed = 1;
  std::size_t replications = 1;
  std::string arms = "survey,csi";
  std::string out = "sim-out";
  std::string export_series;
};

struct ReportArgs {
  std::string options_file;
  std::string survey_file;
  double truth = 0;
  std::optional<double> csi_estimate;
  std::string series_file;
  long replication = -1;
  std::optional<double> baseline;
  std::string out;
};

struct ServeArgs {
  std::string bind;
  std::string operator_bind;
  std::string storage;
  long tick_ms = 250;
};

std::vector<csi::AnswerOption> options_from(const std::string& file) {
  return file.empty() ? csi::sim::default_options() : csi::load_options(file);
}

// Wide CSV: one row per snapshot with every option weight and the running estimate.
void export_series_csv(const csi::sim::ExperimentReport& report, const std::string& path) {
  const auto& options = report.spec.swarm.options;
  std::ostringstream out;
  out << std::setprecision(17) << "replication,t";
  for (const auto& o : options) out << ",w_" << o.label;
  out << ",estimate\n";
  for (const auto& r : report.replications) {
    if (!r.csi) continue;
    for (const auto& s : r.csi->result.series) {
      out << r.index << ',' << csi::to_seconds(s.t);
      for (double w : s.weights) out << ',' << w;
      out << ',' << csi::weighted_estimate(s, options) << '\n';
    }
  }
  csi::write_file_atomic(path, out.str());
}

int run_sim(const SimArgs& a) {
  csi::sim::ExperimentSpec spec;
  spec.swarm.min_size = a.group_min;
  spec.swarm.max_size = a.group_max;
  spec.swarm.duration = csi::from_seconds(a.duration_s);
  spec.swarm.relay_interval = csi::from_seconds(a.relay_s);
  spec.swarm.snapshot_interval = csi::from_seconds(a.snapshot_s);
  spec.swarm.options = options_from(a.options_file);
  spec.swarm.seed = a.seed;
  spec.population.count = a.agents;
  spec.population.kind = csi::sim::agent_kind_from_string(a.model);
  spec.population.conform_rate = a.alpha;
  spec.population.talkativeness = a.talkativeness;
  spec.population.belief_median = a.belief_median;
  spec.population.belief_sigma = a.belief_sigma;
  spec.truth = a.truth;
  spec.replications = a.replications;
  spec.tick = csi::from_seconds(a.tick_s);
  spec.seed = a.seed;
  spec.survey_arm = a.arms.find("survey") != std::string::npos;
  spec.csi_arm = a.arms.find("csi") != std::string::npos;

  const auto report = csi::sim::run_experiment(spec);
  csi::sim::write_outputs(report, a.out);
  if (!a.export_series.empty()) export_series_csv(report, a.export_series);
  std::cout << csi::sim::format_summary(report);
  return 0;
}

int run_report(const ReportArgs& a) {
  const auto options = options_from(a.options_file);
  std::optional<csi::SurveyResult> survey;
  if (!a.survey_file.empty()) survey = csi::load_survey(a.survey_file, options);

  std::optional<csi::DeliberationResult> result;
  if (!a.series_file.empty()) {
    std::ifstream in(a.series_file);
    if (!in) throw csi::ConfigError("cannot read " + a.series_file);
    const auto series = csi::read_series_jsonl(in, a.replication);
    if (series.empty()) throw csi::InsufficientDataError("no snapshots in " + a.series_file);
    result = csi::finalize(series, options);
  } else if (a.csi_estimate) {
    result = csi::DeliberationResult{{}, *a.csi_estimate, csi::nearest_option(options, *a.csi_estimate)};
  }

  const auto report = csi::error_report(a.truth, survey ? &*survey : nullptr, result ? &*result : nullptr, a.baseline);
  std::cout << csi::format_table(report);
  if (!a.out.empty()) {
    std::ofstream out(a.out, std::ios::app);
    if (!out) throw csi::PersistError("cannot write " + a.out);
    out << nlohmann::json(report).dump() << '\n';
  }
  return 0;
}

int run_serve(const ServeArgs& a) {
  auto options = csi::gateway::serve_options_from_environment();
  if (!a.bind.empty()) std::tie(options.client_host, options.client_port) = csi::gateway::parse_bind(a.bind);
  if (!a.operator_bind.empty())
    std::tie(options.operator_host, options.operator_port) = csi::gateway::parse_bind(a.operator_bind);
  if (!a.storage.empty()) options.defaults.storage_dir = a.storage;
  options.tick = csi::Millis{a.tick_ms};

  // Block termination signals before any thread starts so sigwait sees them.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  csi::gateway::Server server(options);
  std::cout << "clients: " << options.client_host << ':' << server.client_port() << '\n'
            << "operator: http://" << options.operator_host << ':' << server.operator_port() << '\n'
            << std::flush;
  int received = 0;
  sigwait(&signals, &received);
  spdlog::info("signal {}, shutting down", received);
  server.stop();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conversational swarm intelligence: simulation, reporting and live sessions"};
  app.require_subcommand(1);
  std::string log_level = "warn";
  app.add_option("--log-level", log_level, "trace|debug|info|warn|error")->capture_default_str();

  SimArgs sim;
  auto* sim_cmd = app.add_subcommand("sim", "Run synthetic-agent experiments");
  sim_cmd->add_option("--agents", sim.agents, "Number of agents")->capture_default_str();
  sim_cmd->add_option("--group-min", sim.group_min, "Minimum room size")->capture_default_str();
  sim_cmd->add_option("--group-max", sim.group_max, "Maximum room size")->capture_default_str();
  sim_cmd->add_option("--duration", sim.duration_s, "Session length in seconds")->capture_default_str();
  sim_cmd->add_option("--relay-interval", sim.relay_s, "Seconds between relay rounds")->capture_default_str();
  sim_cmd->add_option("--snapshot-interval", sim.snapshot_s, "Seconds between sentiment snapshots")
      ->capture_default_str();
  sim_cmd->add_option("--tick", sim.tick_s, "Simulated seconds per tick")->capture_default_str();
  sim_cmd->add_option("--options", sim.options_file, "Options file, one {id,label,value} per line")
      ->check(CLI::ExistingFile);
  sim_cmd->add_option("--truth", sim.truth, "True value")->required();
  sim_cmd->add_option("--model", sim.model, "independent|conformist")
      ->check(CLI::IsMember({"independent", "conformist"}))
      ->capture_default_str();
  sim_cmd->add_option("--alpha", sim.alpha, "Conformity rate")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  sim_cmd->add_option("--talkativeness", sim.talkativeness, "Chance of posting per tick")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  sim_cmd->add_option("--belief-median", sim.belief_median)->capture_default_str();
  sim_cmd->add_option("--belief-sigma", sim.belief_sigma)->capture_default_str();
  sim_cmd->add_option("--seed", sim.seed)->capture_default_str();
  sim_cmd->add_option("--replications", sim.replications)->capture_default_str();
  sim_cmd->add_option("--arms", sim.arms, "Comma separated subset of survey,csi")->capture_default_str();
  sim_cmd->add_option("--out", sim.out, "Output directory")->capture_default_str();
  sim_cmd->add_option("--export-series", sim.export_series, "Also write the sentiment series as wide CSV");

  ReportArgs report;
  auto* report_cmd = app.add_subcommand("report", "Error report for recorded survey and deliberation results");
  report_cmd->add_option("--options", report.options_file)->check(CLI::ExistingFile);
  report_cmd->add_option("--survey", report.survey_file, "Survey responses, {participant,option_id} per line")
      ->check(CLI::ExistingFile);
  report_cmd->add_option("--truth", report.truth)->required();
  auto* estimate = report_cmd->add_option("--csi-estimate", report.csi_estimate, "Final group estimate");
  report_cmd->add_option("--series", report.series_file, "Sentiment series to finalize")
      ->check(CLI::ExistingFile)
      ->excludes(estimate);
  report_cmd->add_option("--replication", report.replication, "Replication to read from --series");
  report_cmd->add_option("--baseline", report.baseline, "Single-shot external estimate");
  report_cmd->add_option("--out", report.out, "Append the report as one JSON line");

  ServeArgs serve;
  auto* serve_cmd = app.add_subcommand("serve", "Run the live session gateway");
  serve_cmd->add_option("--bind", serve.bind, "Client transport host:port (default CSI_BIND or 127.0.0.1:7400)");
  serve_cmd->add_option("--operator-bind", serve.operator_bind,
                        "Operator HTTP host:port (default CSI_OPERATOR_BIND or 127.0.0.1:7401)");
  serve_cmd->add_option("--storage", serve.storage, "Directory for closed sessions (default CSI_STORAGE_DIR)");
  serve_cmd->add_option("--tick-ms", serve.tick_ms)->check(CLI::PositiveNumber)->capture_default_str();

  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(spdlog::level::from_str(log_level));

  try {
    if (*sim_cmd) return run_sim(sim);
    if (*report_cmd) return run_report(report);
    if (*serve_cmd) return run_serve(serve);
  } catch (const csi::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
