#include "pmugame/observability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace pmugame {

Placement::Placement(BusSet buses) : pmu_buses(std::move(buses)) {
  std::sort(pmu_buses.begin(), pmu_buses.end());
  pmu_buses.erase(std::unique(pmu_buses.begin(), pmu_buses.end()), pmu_buses.end());
}

bool Placement::has_pmu(BusId id) const {
  return std::binary_search(pmu_buses.begin(), pmu_buses.end(), id);
}

Placement Placement::with(BusId extra) const {
  BusSet buses = pmu_buses;
  buses.push_back(extra);
  return Placement(std::move(buses));
}

BusSet Placement::uncovered_buses(const Grid& grid) const {
  BusSet out;
  for (const auto& bus : grid.buses()) {
    if (!has_pmu(bus.id)) out.push_back(bus.id);
  }
  return out;
}

double Placement::cost(const Grid& grid) const {
  double total = 0.0;
  for (BusId b : pmu_buses) total += grid.pmu_weight(b);
  return total;
}

bool ObservabilityVector::fully_observed() const {
  return std::all_of(flags_.begin(), flags_.end(), [](std::uint8_t f) { return f != 0; });
}

std::size_t ObservabilityVector::observed_count() const {
  return static_cast<std::size_t>(
      std::count_if(flags_.begin(), flags_.end(), [](std::uint8_t f) { return f != 0; }));
}

namespace {

std::vector<std::uint8_t> plain_flags(const Grid& grid, const std::vector<std::uint8_t>& pmu) {
  std::vector<std::uint8_t> g(grid.bus_count(), 0);
  for (const auto& bus : grid.buses()) {
    const auto i = static_cast<std::size_t>(bus.id - 1);
    if (pmu[i]) {
      g[i] = 1;
      for (BusId j : grid.adjacency(bus.id)) g[static_cast<std::size_t>(j - 1)] = 1;
    }
  }
  return g;
}

bool zib_pass(const Grid& grid, const std::vector<std::uint8_t>& g,
              std::vector<std::uint8_t>& out) {
  out = g;
  bool changed = false;
  for (const auto& bus : grid.buses()) {
    const auto m = static_cast<std::size_t>(bus.id - 1);
    if (g[m]) continue;
    const auto& nbrs = grid.adjacency(bus.id);
    const bool neighbours_observed = std::all_of(
        nbrs.begin(), nbrs.end(), [&](BusId k) { return g[static_cast<std::size_t>(k - 1)] != 0; });
    if (!neighbours_observed) continue;
    const bool touches_zib =
        bus.zib || std::any_of(nbrs.begin(), nbrs.end(), [&](BusId k) { return grid.is_zib(k); });
    if (touches_zib) {
      out[m] = 1;
      changed = true;
    }
  }
  return changed;
}

std::vector<std::uint8_t> zib_fixpoint(const Grid& grid, std::vector<std::uint8_t> g) {
  std::vector<std::uint8_t> next;
  while (zib_pass(grid, g, next)) g.swap(next);
  return g;
}

std::vector<std::uint8_t> pmu_flags(const Grid& grid, const Placement& placement) {
  std::vector<std::uint8_t> pmu(grid.bus_count(), 0);
  for (BusId b : placement.pmu_buses) {
    if (!grid.contains(b)) throw std::out_of_range("placement names unknown bus " + std::to_string(b));
    pmu[static_cast<std::size_t>(b - 1)] = 1;
  }
  return pmu;
}

bool all_set(const std::vector<std::uint8_t>& flags) {
  return std::all_of(flags.begin(), flags.end(), [](std::uint8_t f) { return f != 0; });
}

class PlacementSearch {
 public:
  PlacementSearch(const Grid& grid, bool use_zib) : grid_(grid), use_zib_(use_zib) {
    order_.resize(grid.bus_count());
    std::iota(order_.begin(), order_.end(), BusId{1});
    std::stable_sort(order_.begin(), order_.end(), [&](BusId a, BusId b) {
      return grid.degree(a) > grid.degree(b);
    });
    decision_.assign(grid.bus_count(), kUndecided);
  }

  PlacementResult run() {
    descend(0, 0.0);
    PlacementResult result;
    result.placement = Placement(best_);
    result.cost = best_cost_;
    result.zib_used = use_zib_;
    return result;
  }

 private:
  static constexpr std::int8_t kUndecided = -1;

  bool feasible(const std::vector<std::uint8_t>& pmu) const {
    auto g = plain_flags(grid_, pmu);
    if (all_set(g)) return true;
    return use_zib_ && all_set(zib_fixpoint(grid_, std::move(g)));
  }

  bool ties(double cost) const {
    return std::abs(cost - best_cost_) <= 1e-9 * std::max(1.0, std::abs(best_cost_));
  }

  void descend(std::size_t depth, double cost) {
    if (cost > best_cost_ && !ties(cost)) return;

    // Optimistic completion: every undecided bus gets a PMU. Observability is
    // monotone in the PMU set, so failure here means no completion works.
    std::vector<std::uint8_t> optimistic(grid_.bus_count());
    for (std::size_t i = 0; i < optimistic.size(); ++i) optimistic[i] = decision_[i] != 0;
    if (!feasible(optimistic)) return;

    if (depth == order_.size()) {
      BusSet chosen;
      for (std::size_t i = 0; i < decision_.size(); ++i) {
        if (decision_[i] == 1) chosen.push_back(static_cast<BusId>(i + 1));
      }
      if (cost < best_cost_ && !ties(cost)) {
        best_cost_ = cost;
        best_ = std::move(chosen);
      } else if (ties(cost) && (best_.empty() || chosen < best_)) {
        best_cost_ = std::min(best_cost_, cost);
        best_ = std::move(chosen);
      }
      return;
    }

    const BusId bus = order_[depth];
    const auto i = static_cast<std::size_t>(bus - 1);
    decision_[i] = 1;
    descend(depth + 1, cost + grid_.pmu_weight(bus));
    decision_[i] = 0;
    descend(depth + 1, cost);
    decision_[i] = kUndecided;
  }

  const Grid& grid_;
  bool use_zib_;
  std::vector<BusId> order_;
  std::vector<std::int8_t> decision_;
  double best_cost_ = std::numeric_limits<double>::infinity();
  BusSet best_;
};

}  // namespace

ObservabilityVector observability_vector(const Grid& grid, const Placement& placement) {
  return ObservabilityVector(plain_flags(grid, pmu_flags(grid, placement)));
}

ObservabilityVector zib_observability_pass(const Grid& grid, const ObservabilityVector& g) {
  std::vector<std::uint8_t> out;
  zib_pass(grid, g.flags(), out);
  return ObservabilityVector(std::move(out));
}

ObservabilityVector zib_observability(const Grid& grid, const ObservabilityVector& g) {
  if (g.size() != grid.bus_count()) throw std::invalid_argument("observability vector size mismatch");
  return ObservabilityVector(zib_fixpoint(grid, g.flags()));
}

ObservabilityVector effective_observability(const Grid& grid, const Placement& placement,
                                            bool use_zib) {
  auto g = observability_vector(grid, placement);
  return use_zib ? zib_observability(grid, g) : g;
}

PlacementResult optimal_placement(const Grid& grid, bool use_zib) {
  return PlacementSearch(grid, use_zib).run();
}

BusSet observers(const Grid& grid, const Placement& placement, BusId k) {
  BusSet out;
  if (placement.has_pmu(k)) out.push_back(k);
  for (BusId j : grid.adjacency(k)) {
    if (placement.has_pmu(j)) out.push_back(j);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t observing_count(const Grid& grid, const Placement& placement, BusId k) {
  return observers(grid, placement, k).size();
}

std::size_t attack_observing_count(const Grid& grid, const Placement& placement,
                                   const BusSet& affected) {
  if (affected.empty()) throw std::invalid_argument("affected bus set is empty");
  BusSet seen;
  for (BusId i : affected) {
    const auto obs = observers(grid, placement, i);
    seen.insert(seen.end(), obs.begin(), obs.end());
  }
  std::sort(seen.begin(), seen.end());
  return static_cast<std::size_t>(std::unique(seen.begin(), seen.end()) - seen.begin());
}

}  // namespace pmugame
