#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "csi/config.hpp"

namespace csi {

/// How a population is split into rooms.
///
/// `assignments[i]` is the room of the i-th participant (by position in the
/// participant list the session was created with).
struct PartitionPlan {
  std::vector<std::size_t> group_sizes;
  std::vector<std::size_t> assignments;

  std::size_t room_count() const { return group_sizes.size(); }
  std::size_t participant_count() const { return assignments.size(); }

  /// Participant indices per room, ascending.
  std::vector<std::vector<std::size_t>> members() const;

  bool operator==(const PartitionPlan&) const = default;
};

/// Split `n` participants into rooms of min_size..max_size members.
///
/// Room count: floor(n / min_size) rooms when n is a multiple of min_size.
/// Otherwise one room fewer, so the leftover members plus that room's seats
/// are spread as extra seats over the others (241 at 5..6 gives 47 rooms:
/// 41 of 5 and 6 of 6). If the smaller count cannot hold everyone within
/// max_size, floor(n / min_size) rooms are used. Rooms start at min_size
/// and the fewest rooms are raised toward max_size.
///
/// When n < min_size everyone shares one room. Some populations admit no
/// in-bounds split (n = 7, 8, 9, 13, 14, 19 for bounds 5..6); those keep
/// floor(n / min_size) rooms and spread the excess evenly, so rooms never
/// drop below min_size and exceed max_size by the least possible amount.
///
/// Sizes depend only on (n, min_size, max_size); the participant-to-room
/// assignment is a shuffle driven by `seed`.
PartitionPlan partition(std::size_t n, std::size_t min_size, std::size_t max_size,
                        std::uint64_t seed);

/// True when every room can be kept within [min_size, max_size].
bool partition_feasible(std::size_t n, std::size_t min_size, std::size_t max_size);

/// Number of rooms partition() forms for these bounds.
std::size_t partition_room_count(std::size_t n, std::size_t min_size, std::size_t max_size);

struct Edge {
  std::size_t source = 0;
  std::size_t target = 0;

  auto operator<=>(const Edge&) const = default;
};

/// Directed relay graph over rooms.
struct Topology {
  std::size_t room_count = 0;
  std::vector<Edge> edges;
  TopologyKind kind = TopologyKind::directed_ring;

  bool has_edge(std::size_t source, std::size_t target) const;
  std::vector<std::size_t> targets(std::size_t source) const;

  bool operator==(const Topology&) const = default;
};

Topology build_topology(std::size_t room_count, TopologyKind kind);

/// Longest shortest directed path over all ordered room pairs.
///
/// Throws ContractViolation if some room cannot reach another.
std::size_t propagation_diameter(const Topology& topology);

}  // namespace csi
