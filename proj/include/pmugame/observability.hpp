#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "pmugame/grid.hpp"

namespace pmugame {

/// A set of buses hosting PMUs. Costs come from the grid's pmu weights.
struct Placement {
  BusSet pmu_buses;  // sorted, unique

  Placement() = default;
  explicit Placement(BusSet buses);

  bool has_pmu(BusId id) const;
  std::size_t size() const { return pmu_buses.size(); }
  /// This placement plus one extra PMU at `extra`.
  Placement with(BusId extra) const;
  /// Buses without a PMU (the complement set), ascending.
  BusSet uncovered_buses(const Grid& grid) const;
  double cost(const Grid& grid) const;

  friend bool operator==(const Placement&, const Placement&) = default;
};

/// Per-bus binary observability flags, indexed by bus id - 1.
class ObservabilityVector {
 public:
  ObservabilityVector() = default;
  explicit ObservabilityVector(std::vector<std::uint8_t> flags) : flags_(std::move(flags)) {}

  std::size_t size() const { return flags_.size(); }
  bool observed(BusId id) const { return flags_.at(static_cast<std::size_t>(id - 1)) != 0; }
  bool fully_observed() const;
  std::size_t observed_count() const;
  const std::vector<std::uint8_t>& flags() const { return flags_; }

  friend bool operator==(const ObservabilityVector&, const ObservabilityVector&) = default;

 private:
  std::vector<std::uint8_t> flags_;
};

/// g(Y): bus m is observed iff it hosts a PMU or a neighbour does.
ObservabilityVector observability_vector(const Grid& grid, const Placement& placement);

/// One application of the zero-injection rule: an unobserved bus becomes
/// observed when every neighbour is observed and it, or a neighbour, is a ZIB.
ObservabilityVector zib_observability_pass(const Grid& grid, const ObservabilityVector& g);

/// g'(Y): the zero-injection rule applied until nothing changes.
ObservabilityVector zib_observability(const Grid& grid, const ObservabilityVector& g);

/// g or g' depending on `use_zib`.
ObservabilityVector effective_observability(const Grid& grid, const Placement& placement,
                                            bool use_zib);

struct PlacementResult {
  Placement placement;
  double cost = 0.0;
  bool zib_used = false;
};

/// Minimum-cost placement achieving full observability (g, or g' with
/// `use_zib`). Exact branch-and-bound over buses in descending-degree
/// order; cost ties resolve to the lexicographically smallest bus set.
PlacementResult optimal_placement(const Grid& grid, bool use_zib);

/// O_k: number of PMUs on bus k or its neighbours.
std::size_t observing_count(const Grid& grid, const Placement& placement, BusId k);

/// O(a,d): number of distinct PMUs on or adjacent to any affected bus.
/// Throws std::invalid_argument for an empty affected set.
std::size_t attack_observing_count(const Grid& grid, const Placement& placement,
                                   const BusSet& affected);

/// PMUs on bus k or its neighbours, ascending.
BusSet observers(const Grid& grid, const Placement& placement, BusId k);

}  // namespace pmugame
