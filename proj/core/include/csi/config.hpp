#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace csi {

using Millis = std::chrono::milliseconds;

/// Seconds as a double, for wire formats and reports.
inline double to_seconds(Millis t) { return static_cast<double>(t.count()) / 1000.0; }
Millis from_seconds(double seconds);

/// One of the fixed answers a group deliberates over.
struct AnswerOption {
  std::uint32_t id = 0;
  std::string label;
  double value = 0.0;

  bool operator==(const AnswerOption&) const = default;
};

enum class TopologyKind { directed_ring };

std::string_view to_string(TopologyKind kind);
TopologyKind topology_kind_from_string(std::string_view name);

/// Every tunable of one deliberation.
///
/// Defaults describe a four minute session of five-to-six person rooms
/// wired in a directed ring, relaying every 30 s and sampling sentiment
/// every 15 s. `options` has no default; callers load an option set.
struct SwarmConfig {
  std::size_t min_size = 5;
  std::size_t max_size = 6;
  TopologyKind topology_kind = TopologyKind::directed_ring;
  Millis duration{240'000};
  Millis relay_interval{30'000};
  Millis snapshot_interval{15'000};
  std::vector<AnswerOption> options;
  std::uint64_t seed = 0;

  bool operator==(const SwarmConfig&) const = default;
};

/// Throws ConfigError unless ids are dense from 0, labels and values are
/// distinct, values are positive and the set is non-empty.
void validate_options(std::span<const AnswerOption> options);

/// Throws ConfigError when any SwarmConfig invariant is violated.
void validate(const SwarmConfig& config);

/// Index of the option whose value is closest to `x` (smallest id on ties).
std::uint32_t nearest_option(std::span<const AnswerOption> options, double x);

}  // namespace csi
