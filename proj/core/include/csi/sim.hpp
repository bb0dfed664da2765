#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "csi/config.hpp"
#include "csi/relay.hpp"
#include "csi/sentiment.hpp"
#include "csi/session.hpp"
#include "csi/survey.hpp"
#include "csi/topology.hpp"

namespace csi::sim {

/// Derives independent child seeds from a parent seed (SplitMix64 mixing).
/// All randomness of an experiment flows from one root through this.
class SeedTree {
 public:
  explicit SeedTree(std::uint64_t root) : root_(root) {}
  std::uint64_t root() const { return root_; }
  SeedTree child(std::string_view label) const;
  SeedTree child(std::uint64_t index) const;

 private:
  std::uint64_t root_;
};

enum class AgentKind { independent, conformist };

std::string_view to_string(AgentKind kind);
AgentKind agent_kind_from_string(std::string_view name);

/// A synthetic participant.
struct AgentModel {
  AgentKind kind = AgentKind::independent;
  double belief = 0.0;
  double talkativeness = 0.05;  // chance of posting per tick
  double conform_rate = 0.0;    // conformist only
};

struct PopulationSpec {
  std::size_t count = 241;
  /// Log-normal beliefs with this median and log-scale sigma.
  double belief_median = 500.0;
  double belief_sigma = 0.5;
  /// When set, every agent holds exactly this belief.
  std::optional<double> fixed_belief;
  AgentKind kind = AgentKind::conformist;
  double talkativeness = 0.05;
  double conform_rate = 0.5;
};

struct ExperimentSpec {
  SwarmConfig swarm;
  PopulationSpec population;
  double truth = 0.0;
  bool survey_arm = true;
  bool csi_arm = true;
  std::size_t replications = 1;
  Millis tick{1000};
  std::uint64_t seed = 0;
  DistillerBinding binding = DistillerBinding::mock();
};

/// Throws ConfigError when the spec cannot run.
void validate(const ExperimentSpec& spec);

/// Default ten-option set spanning plausible jar counts; a fixture, not the
/// option set of any particular study.
std::vector<AnswerOption> default_options();

/// Beliefs for one replication, shared by both arms.
std::vector<double> sample_beliefs(const PopulationSpec& population, const SeedTree& seeds);

/// Everything one CSI session produced.
struct CsiRun {
  SwarmConfig config;
  std::vector<std::string> participants;
  PartitionPlan plan;
  Topology topology;
  std::vector<std::vector<Message>> transcripts;
  std::vector<Millis> relay_round_times;
  DeliberationResult result;
  std::vector<DueEvent> events;
};

/// Each agent picks the option nearest its belief.
SurveyResult run_survey(const std::vector<AnswerOption>& options,
                        const std::vector<std::string>& participants,
                        const std::vector<double>& beliefs);

/// One full deliberation under simulated time.
///
/// Per tick: advance the clock and handle due events (relay rounds,
/// sentiment snapshots); then every conformist moves its belief toward the
/// mean value of the options mentioned in its room since the last tick
/// (observer messages included); then each agent posts support for the
/// option nearest its belief with probability talkativeness.
CsiRun run_csi(const ExperimentSpec& spec, const std::vector<std::string>& participants,
               const std::vector<double>& beliefs, const SeedTree& seeds);

struct ReplicationResult {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  std::vector<double> beliefs;
  std::optional<SurveyResult> survey;
  std::optional<CsiRun> csi;
  ErrorReport report;
};

struct ArmSummary {
  std::string method;
  std::size_t n = 0;
  double mean_abs_error = 0.0;
  double sd_abs_error = 0.0;  // n-1 denominator, 0 when n < 2
};

struct ExperimentReport {
  ExperimentSpec spec;
  std::vector<ReplicationResult> replications;
  std::vector<ArmSummary> summary;
};

std::vector<std::string> participant_ids(std::size_t count);

/// Runs every replication. The same spec always yields the same report.
ExperimentReport run_experiment(const ExperimentSpec& spec);

/// Standard deviation across rooms of the room-local leading option value,
/// one entry per relay round. The leading option of a room is taken from the
/// echo-damped tally of its messages within the round; a room silent for a
/// round keeps its previous leader, and rooms that never had one are left
/// out.
std::vector<double> convergence_curve(const CsiRun& run);

/// Writes report.jsonl, series.jsonl, transcript-<rep>-<room>.jsonl and
/// summary.txt into `dir`.
void write_outputs(const ExperimentReport& report, const std::filesystem::path& dir);

/// Method comparison table with per-arm aggregates.
std::string format_summary(const ExperimentReport& report);

}  // namespace csi::sim
