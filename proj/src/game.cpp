#include "pmugame/game.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace pmugame {

std::string_view to_string(Norm norm) {
  switch (norm) {
    case Norm::L1: return "l1";
    case Norm::L2: return "l2";
    case Norm::Linf: return "linf";
  }
  return "?";
}

Norm parse_norm(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "l1") return Norm::L1;
  if (lower == "l2") return Norm::L2;
  if (lower == "linf") return Norm::Linf;
  throw std::invalid_argument("unknown norm '" + std::string(text) + "' (use l1, l2 or linf)");
}

std::string_view to_string(FlowBias bias) {
  return bias == FlowBias::Absolute ? "absolute" : "proportional";
}

FlowBias parse_flow_bias(std::string_view text) {
  if (text == "absolute") return FlowBias::Absolute;
  if (text == "proportional") return FlowBias::Proportional;
  throw std::invalid_argument("unknown flow bias '" + std::string(text) +
                              "' (use absolute or proportional)");
}

void AttackModel::validate() const {
  if (!(epsilon_theta > 0.0) || !std::isfinite(epsilon_theta)) {
    throw std::invalid_argument("epsilon_theta must be positive");
  }
  if (!(epsilon_flow > 0.0) || !std::isfinite(epsilon_flow)) {
    throw std::invalid_argument("epsilon_flow must be positive");
  }
}

AttackModel AttackModel::scaled(double factor) const {
  AttackModel out = *this;
  out.epsilon_theta *= factor;
  out.epsilon_flow *= factor;
  return out;
}

double vector_norm(const std::vector<double>& v, Norm norm) {
  double acc = 0.0;
  switch (norm) {
    case Norm::L1:
      for (double x : v) acc += std::abs(x);
      return acc;
    case Norm::L2:
      for (double x : v) acc += x * x;
      return std::sqrt(acc);
    case Norm::Linf:
      for (double x : v) acc = std::max(acc, std::abs(x));
      return acc;
  }
  return acc;
}

std::string AttackAction::label() const {
  std::string out = std::to_string(target) + ":{";
  bool first = true;
  for (BusId k : flows) {
    if (!first) out += ',';
    out += "p" + std::to_string(target) + "-" + std::to_string(k);
    first = false;
  }
  if (angle) {
    if (!first) out += ',';
    out += "theta" + std::to_string(target);
  }
  return out + "}";
}

std::string AttackAction::description() const {
  std::string out;
  if (!flows.empty()) {
    out = flows.size() == 1 ? "Line " : "Lines ";
    for (std::size_t i = 0; i < flows.size(); ++i) {
      if (i) out += ", ";
      const BusId lo = std::min(target, flows[i]);
      const BusId hi = std::max(target, flows[i]);
      out += std::to_string(lo) + "-" + std::to_string(hi);
    }
  }
  if (angle) {
    out += out.empty() ? "Angle " : " + angle ";
    out += std::to_string(target);
  }
  return out;
}

std::vector<AttackAction> enumerate_attacks(const Grid& grid, const Placement& placement) {
  std::vector<AttackAction> out;
  for (BusId u : placement.pmu_buses) {
    const BusSet& nbrs = grid.adjacency(u);
    const std::size_t m = nbrs.size() + 1;  // flows, then the angle
    for (std::size_t size = 1; size <= m; ++size) {
      // Lexicographic k-combinations of measurement indices.
      std::vector<std::size_t> pick(size);
      std::iota(pick.begin(), pick.end(), std::size_t{0});
      while (true) {
        AttackAction a;
        a.target = u;
        for (std::size_t idx : pick) {
          if (idx < nbrs.size()) {
            a.flows.push_back(nbrs[idx]);
          } else {
            a.angle = true;
          }
        }
        out.push_back(std::move(a));

        std::size_t i = size;
        while (i > 0 && pick[i - 1] == m - size + (i - 1)) --i;
        if (i == 0) break;
        ++pick[i - 1];
        for (std::size_t j = i; j < size; ++j) pick[j] = pick[j - 1] + 1;
      }
    }
  }
  return out;
}

std::size_t attack_count(const Grid& grid, const Placement& placement) {
  std::size_t total = 0;
  for (BusId u : placement.pmu_buses) {
    total += (std::size_t{1} << (grid.degree(u) + 1)) - 1;
  }
  return total;
}

BusSet redundancy_gain(const Grid& grid, const Placement& placement, BusId alpha) {
  BusSet gain;
  const Placement extended = placement.with(alpha);
  for (BusId k : placement.uncovered_buses(grid)) {
    if (observing_count(grid, placement, k) == 1 && observing_count(grid, extended, k) >= 2) {
      gain.push_back(k);
    }
  }
  return gain;
}

BusSet defense_candidates(const Grid& grid, const Placement& placement) {
  const BusSet pool = placement.uncovered_buses(grid);
  if (pool.empty()) return {};

  std::vector<BusSet> gain;
  gain.reserve(pool.size());
  for (BusId alpha : pool) gain.push_back(redundancy_gain(grid, placement, alpha));

  std::vector<std::size_t> live;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (!gain[i].empty()) live.push_back(i);
  }
  if (live.empty()) return {pool.front()};

  // Union-find over the "equal or nested" relation.
  std::vector<std::size_t> parent(pool.size());
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  auto nested = [](const BusSet& a, const BusSet& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
  };
  for (std::size_t x = 0; x < live.size(); ++x) {
    for (std::size_t y = x + 1; y < live.size(); ++y) {
      const auto& ga = gain[live[x]];
      const auto& gb = gain[live[y]];
      if (nested(ga, gb) || nested(gb, ga)) parent[find(live[x])] = find(live[y]);
    }
  }

  // Representative per class: largest gain, then smallest bus id. `live` is
  // ascending by bus id, so strict comparison keeps the earliest on ties.
  std::vector<std::ptrdiff_t> best(pool.size(), -1);
  for (std::size_t i : live) {
    const std::size_t root = find(i);
    if (best[root] < 0 || gain[i].size() > gain[static_cast<std::size_t>(best[root])].size()) {
      best[root] = static_cast<std::ptrdiff_t>(i);
    }
  }
  BusSet out;
  for (auto b : best) {
    if (b >= 0) out.push_back(pool[static_cast<std::size_t>(b)]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

BusSet affected_buses(const Grid& grid, const AttackAction& attack) {
  BusSet out = attack.flows;
  if (attack.angle) {
    out.push_back(attack.target);
    const auto& nbrs = grid.adjacency(attack.target);
    out.insert(out.end(), nbrs.begin(), nbrs.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<double> attack_effect(const Grid& grid, const BaseState& base,
                                  const Placement& placement, const AttackAction& attack,
                                  const AttackModel& model) {
  std::vector<double> effect(grid.bus_count(), 0.0);
  const BusId u = attack.target;
  auto flow_biased = [&](BusId k) {
    return std::binary_search(attack.flows.begin(), attack.flows.end(), k);
  };

  for (const auto& bus : grid.buses()) {
    const BusId k = bus.id;
    const BusSet obs = observers(grid, placement, k);
    if (obs.empty() || obs.front() != u) continue;  // estimate untouched by the attack
    const bool angle_biased = attack.angle;
    if (k == u) {
      if (!angle_biased) continue;
      const double measured = base.angle(u) + model.epsilon_theta;
      effect[static_cast<std::size_t>(k - 1)] = base.angle(k) - measured;
      continue;
    }
    if (!angle_biased && !flow_biased(k)) continue;
    const double theta_u = base.angle(u) + (angle_biased ? model.epsilon_theta : 0.0);
    const double measured = base.flow(grid, u, k);
    const double p_uk = measured + (flow_biased(k) ? model.flow_offset(measured) : 0.0);
    const double x_uk = grid.lines()[*grid.line_between(u, k)].reactance;
    effect[static_cast<std::size_t>(k - 1)] = base.angle(k) - propagate_angle(theta_u, p_uk, x_uk);
  }
  return effect;
}

PayoffMatrix::PayoffMatrix(std::vector<AttackAction> attacks, BusSet defenses,
                           Eigen::MatrixXd values, Indicator detected)
    : attacks_(std::move(attacks)),
      defenses_(std::move(defenses)),
      values_(std::move(values)),
      detected_(std::move(detected)) {
  if (static_cast<std::size_t>(values_.rows()) != attacks_.size() ||
      static_cast<std::size_t>(values_.cols()) != defenses_.size() ||
      values_.rows() != detected_.rows() || values_.cols() != detected_.cols()) {
    throw std::invalid_argument("payoff matrix dimensions do not match its action sets");
  }
}

double PayoffMatrix::max_value() const {
  return values_.size() == 0 ? 0.0 : std::max(0.0, values_.maxCoeff());
}

namespace {

std::string shortest(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string PayoffMatrix::to_csv() const {
  std::ostringstream out;
  out << "attack";
  for (BusId d : defenses_) out << ',' << d;
  out << '\n';
  for (std::size_t a = 0; a < rows(); ++a) {
    out << '"' << attacks_[a].label() << '"';
    for (std::size_t d = 0; d < cols(); ++d) {
      out << ',' << shortest(value(a, d)) << '|' << (detected(a, d) ? 1 : 0);
    }
    out << '\n';
  }
  return out.str();
}

PayoffMatrix build_payoff_matrix(const Grid& grid, const BaseState& base,
                                 const Placement& placement,
                                 const std::vector<AttackAction>& attacks,
                                 const BusSet& defenses, const AttackModel& model) {
  model.validate();
  if (attacks.empty() || defenses.empty()) {
    throw std::invalid_argument("payoff matrix needs nonempty attack and defense sets");
  }
  const auto rows = static_cast<Eigen::Index>(attacks.size());
  const auto cols = static_cast<Eigen::Index>(defenses.size());
  Eigen::MatrixXd values = Eigen::MatrixXd::Zero(rows, cols);
  PayoffMatrix::Indicator detected = PayoffMatrix::Indicator::Zero(rows, cols);

  std::vector<BusSet> affected;
  affected.reserve(attacks.size());
  for (const auto& a : attacks) affected.push_back(affected_buses(grid, a));

  for (Eigen::Index c = 0; c < cols; ++c) {
    const BusId d = defenses[static_cast<std::size_t>(c)];
    if (placement.has_pmu(d)) {
      throw std::invalid_argument("defense bus " + std::to_string(d) + " already hosts a PMU");
    }
    const Placement extended = placement.with(d);
    for (Eigen::Index r = 0; r < rows; ++r) {
      const auto i = static_cast<std::size_t>(r);
      if (attack_observing_count(grid, extended, affected[i]) > 1) {
        detected(r, c) = 1;
      } else {
        values(r, c) = vector_norm(attack_effect(grid, base, extended, attacks[i], model), model.norm);
      }
    }
  }
  return PayoffMatrix(attacks, defenses, std::move(values), std::move(detected));
}

}  // namespace pmugame
