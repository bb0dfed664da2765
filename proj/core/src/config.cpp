#include "csi/config.hpp"

#include <cmath>
#include <set>
#include <string>

#include "csi/errors.hpp"

namespace csi {

Millis from_seconds(double seconds) {
  return Millis{static_cast<Millis::rep>(std::llround(seconds * 1000.0))};
}

std::string_view to_string(TopologyKind kind) {
  switch (kind) {
    case TopologyKind::directed_ring:
      return "directed-ring";
  }
  return "unknown";
}

TopologyKind topology_kind_from_string(std::string_view name) {
  if (name == "directed-ring" || name == "ring") return TopologyKind::directed_ring;
  throw ConfigError("unknown topology kind: " + std::string(name));
}

void validate_options(std::span<const AnswerOption> options) {
  if (options.empty()) throw ConfigError("option set is empty");
  std::set<std::string> labels;
  std::set<double> values;
  for (std::size_t i = 0; i < options.size(); ++i) {
    const auto& o = options[i];
    if (o.id != i) throw ConfigError("option ids must be dense from 0; got " + std::to_string(o.id) +
                                     " at position " + std::to_string(i));
    if (o.label.empty()) throw ConfigError("option " + std::to_string(o.id) + " has an empty label");
    if (!(o.value > 0.0) || !std::isfinite(o.value))
      throw ConfigError("option " + std::to_string(o.id) + " must have a positive value");
    if (!labels.insert(o.label).second) throw ConfigError("duplicate option label: " + o.label);
    if (!values.insert(o.value).second)
      throw ConfigError("duplicate option value for label: " + o.label);
  }
}

void validate(const SwarmConfig& config) {
  if (config.min_size < 1) throw ConfigError("min_size must be at least 1");
  if (config.max_size < config.min_size) throw ConfigError("max_size must be >= min_size");
  if (config.duration <= Millis{0}) throw ConfigError("duration must be positive");
  if (config.snapshot_interval <= Millis{0} || config.snapshot_interval > config.duration)
    throw ConfigError("snapshot_interval must lie in (0, duration]");
  if (config.relay_interval <= Millis{0} || config.relay_interval > config.duration)
    throw ConfigError("relay_interval must lie in (0, duration]");
  validate_options(config.options);
}

std::uint32_t nearest_option(std::span<const AnswerOption> options, double x) {
  std::uint32_t best = options.front().id;
  double best_dist = std::abs(options.front().value - x);
  for (const auto& o : options.subspan(1)) {
    const double d = std::abs(o.value - x);
    if (d < best_dist || (d == best_dist && o.id < best)) {
      best = o.id;
      best_dist = d;
    }
  }
  return best;
}

}  // namespace csi
