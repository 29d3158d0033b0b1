#pragma once

#include <string>
#include <vector>

#include "pmugame/equilibrium.hpp"
#include "pmugame/exp3.hpp"
#include "pmugame/game.hpp"
#include "pmugame/grid.hpp"
#include "pmugame/observability.hpp"

namespace pmugame {

/// Everything one game instance needs: the grid, its base flow, the optimal
/// placement for the chosen observability rule, the defense candidates and
/// the payoff matrix.
struct Scenario {
  Grid grid;
  BaseState base;
  bool zib = false;
  AttackModel model;
  PlacementResult placement;
  BusSet defenses;
  std::vector<AttackAction> attacks;
  PayoffMatrix matrix;

  std::string label() const { return zib ? "zib" : "no-zib"; }
};

/// Defense candidates are always derived from the placement that ignores
/// ZIBs; with `zib` set they are then filtered to buses without a PMU in the
/// ZIB placement.
Scenario build_scenario(Grid grid, bool zib, const AttackModel& model = {});

/// sum over (a, d) of rho_a mu_d [detected(a, d)].
double detection_rate(const PayoffMatrix& m, const MixedStrategy& attacker,
                      const MixedStrategy& defender);
/// Detection rate against a defender choosing uniformly over S_D.
double naive_detection_rate(const PayoffMatrix& m, const MixedStrategy& attacker);

/// One displayed row of an aggregated strategy table.
struct StrategyRow {
  std::string label;
  std::vector<std::size_t> members;  // indices into the action set
  double probability = 0.0;
};

/// Attack rows in the support (probability above `threshold`) merged when
/// their payoff rows and detected-indicator vectors are identical; ordered by
/// first member.
std::vector<StrategyRow> aggregate_attacker(const PayoffMatrix& m, const MixedStrategy& attacker,
                                            double threshold = 1e-6);
std::vector<StrategyRow> aggregate_defender(const PayoffMatrix& m, const MixedStrategy& defender,
                                            double threshold = 1e-6);

struct DetectionReport {
  std::string scenario;
  std::string solver;
  MixedStrategy attacker;
  MixedStrategy defender;
  double value = 0.0;
  double exploitability = 0.0;
  double detection_rate = 0.0;
  double naive_rate = 0.0;
  double no_defense_rate = 0.0;
  std::vector<StrategyRow> attacker_table;
  std::vector<StrategyRow> defender_table;

  double improvement() const { return detection_rate - naive_rate; }
};

/// Throws std::invalid_argument if the strategies do not fit the scenario.
DetectionReport build_report(const Scenario& scenario, std::string solver,
                             const MixedStrategy& attacker, const MixedStrategy& defender);

/// Rates rounded to 4 decimals.
std::string report_to_json(const std::vector<DetectionReport>& reports);
std::string report_to_text(const std::vector<DetectionReport>& reports);
/// scenario,strategy,rate
std::string report_to_csv(const std::vector<DetectionReport>& reports);

std::string placement_to_json(const PlacementResult& result);
std::string strategy_to_json(const std::vector<std::string>& actions, const MixedStrategy& strategy,
                             double value, double exploitability, std::size_t iterations,
                             std::uint64_t seed);

}  // namespace pmugame
