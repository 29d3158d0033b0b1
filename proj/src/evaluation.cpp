#include "pmugame/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace pmugame {

namespace {

using nlohmann::ordered_json;

double round4(double x) { return std::round(x * 1e4) / 1e4; }

std::string fixed(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, x);
  return buf;
}

void check_dims(const PayoffMatrix& m, const MixedStrategy& attacker) {
  if (attacker.size() != m.rows()) {
    throw std::invalid_argument("attacker strategy has " + std::to_string(attacker.size()) +
                                " entries for " + std::to_string(m.rows()) + " attacks");
  }
}

void check_dims(const PayoffMatrix& m, const MixedStrategy& attacker,
                const MixedStrategy& defender) {
  check_dims(m, attacker);
  if (defender.size() != m.cols()) {
    throw std::invalid_argument("defender strategy has " + std::to_string(defender.size()) +
                                " entries for " + std::to_string(m.cols()) + " defenses");
  }
}

ordered_json rows_json(const std::vector<StrategyRow>& rows) {
  ordered_json out = ordered_json::array();
  for (const auto& r : rows) {
    out.push_back({{"label", r.label}, {"probability", round4(r.probability)}});
  }
  return out;
}

}  // namespace

Scenario build_scenario(Grid grid, bool zib, const AttackModel& model) {
  model.validate();
  BaseState base = dc_power_flow(grid);
  PlacementResult placement = optimal_placement(grid, zib);
  const PlacementResult plain = zib ? optimal_placement(grid, false) : placement;
  BusSet defenses;
  for (BusId b : defense_candidates(grid, plain.placement)) {
    if (!placement.placement.has_pmu(b)) defenses.push_back(b);
  }
  if (defenses.empty()) throw std::runtime_error("no defense candidates for this grid");
  std::vector<AttackAction> attacks = enumerate_attacks(grid, placement.placement);
  PayoffMatrix matrix = build_payoff_matrix(grid, base, placement.placement, attacks, defenses, model);
  return Scenario{std::move(grid), std::move(base), zib,     model,
                  std::move(placement), std::move(defenses), std::move(attacks), std::move(matrix)};
}

double detection_rate(const PayoffMatrix& m, const MixedStrategy& attacker,
                      const MixedStrategy& defender) {
  check_dims(m, attacker, defender);
  double rate = 0.0;
  for (std::size_t a = 0; a < m.rows(); ++a) {
    for (std::size_t d = 0; d < m.cols(); ++d) {
      if (m.detected(a, d)) rate += attacker[a] * defender[d];
    }
  }
  return rate;
}

double naive_detection_rate(const PayoffMatrix& m, const MixedStrategy& attacker) {
  if (m.cols() == 0) throw std::invalid_argument("naive defense over an empty S_D");
  return detection_rate(m, attacker, MixedStrategy::uniform(m.cols()));
}

std::vector<StrategyRow> aggregate_attacker(const PayoffMatrix& m, const MixedStrategy& attacker,
                                            double threshold) {
  check_dims(m, attacker);
  auto same = [&](std::size_t a, std::size_t b) {
    const double scale = std::max(m.max_value(), 1e-300);
    for (std::size_t d = 0; d < m.cols(); ++d) {
      if (m.detected(a, d) != m.detected(b, d)) return false;
      if (std::abs(m.value(a, d) - m.value(b, d)) > 1e-9 * scale) return false;
    }
    return true;
  };
  std::vector<StrategyRow> rows;
  for (std::size_t a = 0; a < m.rows(); ++a) {
    if (!(attacker[a] > threshold)) continue;
    auto it = std::find_if(rows.begin(), rows.end(),
                           [&](const StrategyRow& r) { return same(r.members.front(), a); });
    if (it == rows.end()) it = rows.insert(rows.end(), StrategyRow{});
    it->members.push_back(a);
    it->probability += attacker[a];
  }
  for (auto& row : rows) {
    if (row.members.size() > 3) {
      row.label = m.attacks()[row.members.front()].description() + " (+" +
                  std::to_string(row.members.size() - 1) + " equivalent)";
      continue;
    }
    for (std::size_t a : row.members) {
      if (!row.label.empty()) row.label += "; ";
      row.label += m.attacks()[a].description();
    }
  }
  return rows;
}

std::vector<StrategyRow> aggregate_defender(const PayoffMatrix& m, const MixedStrategy& defender,
                                            double threshold) {
  if (defender.size() != m.cols()) throw std::invalid_argument("defender strategy size mismatch");
  std::vector<StrategyRow> rows;
  for (std::size_t d = 0; d < m.cols(); ++d) {
    if (!(defender[d] > threshold)) continue;
    rows.push_back({"Bus " + std::to_string(m.defenses()[d]), {d}, defender[d]});
  }
  return rows;
}

DetectionReport build_report(const Scenario& scenario, std::string solver,
                             const MixedStrategy& attacker, const MixedStrategy& defender) {
  const PayoffMatrix& m = scenario.matrix;
  check_dims(m, attacker, defender);
  DetectionReport r;
  r.scenario = scenario.label();
  r.solver = std::move(solver);
  r.attacker = attacker;
  r.defender = defender;
  r.value = expected_payoff(m, attacker, defender);
  r.exploitability = exploitability(m, attacker, defender);
  r.detection_rate = detection_rate(m, attacker, defender);
  r.naive_rate = naive_detection_rate(m, attacker);
  r.no_defense_rate = 0.0;
  for (std::size_t a = 0; a < m.rows(); ++a) {
    const auto seen = attack_observing_count(scenario.grid, scenario.placement.placement,
                                             affected_buses(scenario.grid, m.attacks()[a]));
    if (seen > 1) r.no_defense_rate += attacker[a];
  }
  r.attacker_table = aggregate_attacker(m, attacker);
  r.defender_table = aggregate_defender(m, defender);
  return r;
}

std::string report_to_json(const std::vector<DetectionReport>& reports) {
  ordered_json out = ordered_json::array();
  for (const auto& r : reports) {
    out.push_back({{"scenario", r.scenario},
                   {"solver", r.solver},
                   {"value", r.value},
                   {"exploitability", r.exploitability},
                   {"detection_rate", round4(r.detection_rate)},
                   {"naive_rate", round4(r.naive_rate)},
                   {"no_defense_rate", round4(r.no_defense_rate)},
                   {"improvement", round4(r.improvement())},
                   {"attacker", rows_json(r.attacker_table)},
                   {"defender", rows_json(r.defender_table)}});
  }
  return out.dump(2) + "\n";
}

std::string report_to_text(const std::vector<DetectionReport>& reports) {
  std::ostringstream out;
  for (const auto& r : reports) {
    out << "[" << r.scenario << " / " << r.solver << "]\n";
    out << "  attacker\n";
    for (const auto& row : r.attacker_table) {
      out << "    " << fixed(row.probability, 4) << "  " << row.label << "\n";
    }
    out << "  defender\n";
    for (const auto& row : r.defender_table) {
      out << "    " << fixed(row.probability, 4) << "  " << row.label << "\n";
    }
    out << "  detection rate   " << fixed(100.0 * r.detection_rate, 2) << "%\n";
    out << "  naive defense    " << fixed(100.0 * r.naive_rate, 2) << "%\n";
    out << "  no defense       " << fixed(100.0 * r.no_defense_rate, 2) << "%\n";
    out << "  improvement      " << fixed(100.0 * r.improvement(), 2) << " pp\n";
  }
  return out.str();
}

std::string report_to_csv(const std::vector<DetectionReport>& reports) {
  std::ostringstream out;
  out << "scenario,strategy,rate\n";
  for (const auto& r : reports) {
    out << r.scenario << ',' << r.solver << ',' << fixed(r.detection_rate, 4) << '\n';
    out << r.scenario << ",naive," << fixed(r.naive_rate, 4) << '\n';
    out << r.scenario << ",none," << fixed(r.no_defense_rate, 4) << '\n';
  }
  return out.str();
}

std::string placement_to_json(const PlacementResult& result) {
  ordered_json out = {{"pmu_buses", result.placement.pmu_buses},
                      {"cost", result.cost},
                      {"zib_used", result.zib_used}};
  return out.dump(2) + "\n";
}

std::string strategy_to_json(const std::vector<std::string>& actions, const MixedStrategy& strategy,
                             double value, double exploitability, std::size_t iterations,
                             std::uint64_t seed) {
  if (actions.size() != strategy.size()) throw std::invalid_argument("action/probability size mismatch");
  ordered_json out = {{"actions", actions},
                      {"probabilities", strategy.probabilities()},
                      {"value", value},
                      {"exploitability", exploitability},
                      {"iterations", iterations},
                      {"seed", seed}};
  return out.dump(2) + "\n";
}

}  // namespace pmugame
