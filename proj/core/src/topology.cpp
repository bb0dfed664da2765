#include "csi/topology.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <numeric>
#include <random>

#include "csi/errors.hpp"

namespace csi {

std::vector<std::vector<std::size_t>> PartitionPlan::members() const {
  std::vector<std::vector<std::size_t>> rooms(group_sizes.size());
  for (std::size_t p = 0; p < assignments.size(); ++p) rooms[assignments[p]].push_back(p);
  return rooms;
}

bool partition_feasible(std::size_t n, std::size_t min_size, std::size_t max_size) {
  if (n < min_size) return false;
  return (n / min_size) * max_size >= n;
}

std::size_t partition_room_count(std::size_t n, std::size_t min_size, std::size_t max_size) {
  if (n < min_size) return 1;
  const std::size_t rooms = n / min_size;
  if (n % min_size != 0 && rooms > 1 && (rooms - 1) * max_size >= n) return rooms - 1;
  return rooms;
}

namespace {

std::vector<std::size_t> group_sizes_for(std::size_t n, std::size_t min_size, std::size_t max_size) {
  const std::size_t rooms = partition_room_count(n, min_size, max_size);
  if (n < min_size) return {n};
  std::vector<std::size_t> sizes(rooms, min_size);
  std::size_t remainder = n - rooms * min_size;
  if (rooms * max_size >= n) {
    // Fill rooms up to max_size one at a time so the fewest are raised.
    const std::size_t headroom = max_size - min_size;
    for (std::size_t i = 0; remainder > 0; ++i) {
      const std::size_t add = std::min(headroom, remainder);
      sizes[i] += add;
      remainder -= add;
    }
  } else {
    for (std::size_t i = 0; remainder > 0; ++i, --remainder) sizes[i % rooms] += 1;
  }
  return sizes;
}

}  // namespace

PartitionPlan partition(std::size_t n, std::size_t min_size, std::size_t max_size,
                        std::uint64_t seed) {
  if (n < 1) throw ContractViolation("partition: population must be non-empty");
  if (min_size < 1 || max_size < min_size)
    throw ContractViolation("partition: need 1 <= min_size <= max_size");

  PartitionPlan plan;
  plan.group_sizes = group_sizes_for(n, min_size, max_size);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  plan.assignments.assign(n, 0);
  std::size_t next = 0;
  for (std::size_t room = 0; room < plan.group_sizes.size(); ++room)
    for (std::size_t k = 0; k < plan.group_sizes[room]; ++k) plan.assignments[order[next++]] = room;
  return plan;
}

bool Topology::has_edge(std::size_t source, std::size_t target) const {
  return std::binary_search(edges.begin(), edges.end(), Edge{source, target});
}

std::vector<std::size_t> Topology::targets(std::size_t source) const {
  std::vector<std::size_t> out;
  auto it = std::lower_bound(edges.begin(), edges.end(), Edge{source, 0});
  for (; it != edges.end() && it->source == source; ++it) out.push_back(it->target);
  return out;
}

Topology build_topology(std::size_t room_count, TopologyKind kind) {
  if (room_count < 1) throw ContractViolation("build_topology: room_count must be >= 1");
  Topology t;
  t.room_count = room_count;
  t.kind = kind;
  switch (kind) {
    case TopologyKind::directed_ring:
      if (room_count > 1)
        for (std::size_t i = 0; i < room_count; ++i) t.edges.push_back({i, (i + 1) % room_count});
      break;
  }
  std::sort(t.edges.begin(), t.edges.end());
  return t;
}

std::size_t propagation_diameter(const Topology& topology) {
  const std::size_t n = topology.room_count;
  std::vector<std::vector<std::size_t>> adjacency(n);
  for (const auto& e : topology.edges) adjacency[e.source].push_back(e.target);

  constexpr std::size_t unreached = std::numeric_limits<std::size_t>::max();
  std::size_t diameter = 0;
  std::vector<std::size_t> dist(n);
  for (std::size_t start = 0; start < n; ++start) {
    std::fill(dist.begin(), dist.end(), unreached);
    dist[start] = 0;
    std::deque<std::size_t> queue{start};
    while (!queue.empty()) {
      const auto u = queue.front();
      queue.pop_front();
      for (auto v : adjacency[u])
        if (dist[v] == unreached) {
          dist[v] = dist[u] + 1;
          queue.push_back(v);
        }
    }
    for (auto d : dist) {
      if (d == unreached) throw ContractViolation("propagation_diameter: topology is not strongly connected");
      diameter = std::max(diameter, d);
    }
  }
  return diameter;
}

}  // namespace csi
