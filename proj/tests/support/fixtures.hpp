#pragma once

#include <string>
#include <vector>

#include "csi/config.hpp"

namespace csi::test {

// Ten options that include the values used in hand-worked examples (500, 720).
inline std::vector<AnswerOption> jar_options() {
  const double values[] = {200, 300, 400, 500, 600, 659, 720, 800, 900, 1100};
  std::vector<AnswerOption> out;
  for (std::uint32_t i = 0; i < 10; ++i) {
    const auto v = static_cast<long>(values[i]);
    out.push_back({i, std::to_string(v), values[i]});
  }
  return out;
}

inline std::uint32_t id_of(const std::vector<AnswerOption>& options, double value) {
  for (const auto& o : options)
    if (o.value == value) return o.id;
  throw std::out_of_range("no option with value " + std::to_string(value));
}

inline SwarmConfig default_config(std::uint64_t seed = 1) {
  SwarmConfig c;
  c.options = jar_options();
  c.seed = seed;
  return c;
}

inline std::vector<std::string> ids(std::size_t n, const std::string& prefix = "p") {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

}  // namespace csi::test
