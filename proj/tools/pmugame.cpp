#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pmugame/equilibrium.hpp"
#include "pmugame/evaluation.hpp"
#include "pmugame/exp3.hpp"
#include "pmugame/game.hpp"
#include "pmugame/grid.hpp"
#include "pmugame/observability.hpp"

namespace fs = std::filesystem;
using namespace pmugame;

namespace {

enum Exit { kOk = 0, kInput = 2, kSolver = 3, kStrict = 4 };

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct StrictFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string grid = PMUGAME_DEFAULT_GRID;
  bool zib = false;
  std::string solver = "both";
  std::size_t iters = 200000;
  std::uint64_t seed = 42;
  std::optional<double> eps_theta;
  std::optional<double> eps_flow;
  std::string norm;
  std::string flow_bias;
  std::string out;
  bool strict = false;
  double max_exploitability = 0.10;
};

std::string default_out() {
  const char* env = std::getenv("PMUGAME_OUT");
  return env && *env ? env : "pmugame-out";
}

AttackModel attack_model(const RunConfig& cfg) {
  AttackModel m;
  if (cfg.eps_theta) m.epsilon_theta = *cfg.eps_theta;
  if (cfg.eps_flow) m.epsilon_flow = *cfg.eps_flow;
  try {
    if (!cfg.norm.empty()) m.norm = parse_norm(cfg.norm);
    if (!cfg.flow_bias.empty()) m.flow_bias = parse_flow_bias(cfg.flow_bias);
    m.validate();
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  return m;
}

void check_config(const RunConfig& cfg) {
  if (cfg.iters < 1) throw InputError("--iters must be at least 1");
  if (cfg.solver != "lp" && cfg.solver != "exp3" && cfg.solver != "both") {
    throw InputError("--solver must be lp, exp3 or both");
  }
  if (!(cfg.max_exploitability >= 0.0)) throw InputError("--max-exploitability must be nonnegative");
  attack_model(cfg);
}

Grid read_grid(const RunConfig& cfg) {
  try {
    return load_grid_file(cfg.grid);
  } catch (const ParseError& e) {
    throw InputError(e.what());
  } catch (const ValidationError& e) {
    throw InputError(e.what());
  }
}

Scenario scenario_for(const RunConfig& cfg, bool zib) {
  Grid grid = read_grid(cfg);
  const AttackModel model = attack_model(cfg);
  try {
    return build_scenario(std::move(grid), zib, model);
  } catch (const ValidationError& e) {
    throw InputError(cfg.grid + ": " + e.what());
  }
}

// Everything is computed before this is first called, so a failed run leaves
// no partial output behind.
void write_file(const RunConfig& cfg, const std::string& name, const std::string& body) {
  const fs::path dir(cfg.out);
  fs::create_directories(dir);
  std::ofstream f(dir / name, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
  f << body;
}

std::vector<std::string> attack_labels(const PayoffMatrix& m) {
  std::vector<std::string> out;
  for (const auto& a : m.attacks()) out.push_back(a.label());
  return out;
}

std::vector<std::string> defense_labels(const PayoffMatrix& m) {
  std::vector<std::string> out;
  for (BusId b : m.defenses()) out.push_back(std::to_string(b));
  return out;
}

std::string cell(double p) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%8.4f", p);
  return buf;
}

void print_side_by_side(const PayoffMatrix& m, const EquilibriumResult& lp, const SelfPlayResult& ex) {
  std::cout << "  attack" << std::string(34, ' ') << "      lp    exp3\n";
  for (std::size_t a = 0; a < m.rows(); ++a) {
    if (lp.attacker[a] < 1e-4 && ex.attacker[a] < 0.01) continue;
    std::string label = m.attacks()[a].description();
    label.resize(std::max<std::size_t>(label.size(), 40), ' ');
    std::cout << "  " << label << cell(lp.attacker[a]) << cell(ex.attacker[a]) << "\n";
  }
  std::cout << "  defense" << std::string(33, ' ') << "      lp    exp3\n";
  for (std::size_t d = 0; d < m.cols(); ++d) {
    std::string label = "Bus " + std::to_string(m.defenses()[d]);
    label.resize(40, ' ');
    std::cout << "  " << label << cell(lp.defender[d]) << cell(ex.defender[d]) << "\n";
  }
}

struct Solved {
  std::optional<EquilibriumResult> lp;
  std::optional<SelfPlayResult> exp3;
};

Solved solve(const RunConfig& cfg, const Scenario& s) {
  Solved out;
  try {
    if (cfg.solver != "exp3" || cfg.strict) out.lp = solve_minimax(s.matrix);
    if (cfg.solver != "lp") {
      SelfPlayOptions opt;
      opt.iterations = cfg.iters;
      opt.seed = cfg.seed;
      out.exp3 = exp3_selfplay(s.matrix, opt);
    }
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  return out;
}

void check_strict(const RunConfig& cfg, const Solved& solved) {
  if (!cfg.strict || !solved.exp3) return;
  const double bound = cfg.max_exploitability * std::abs(solved.lp->value);
  if (solved.exp3->exploitability > bound) {
    throw StrictFailure("EXP3 exploitability " + std::to_string(solved.exp3->exploitability) +
                        " exceeds " + std::to_string(bound));
  }
}

std::vector<DetectionReport> reports_for(const RunConfig& cfg, const Scenario& s, const Solved& solved) {
  std::vector<DetectionReport> out;
  if (solved.lp && cfg.solver != "exp3") {
    out.push_back(build_report(s, "lp", solved.lp->attacker, solved.lp->defender));
  }
  if (solved.exp3) {
    out.push_back(build_report(s, "exp3", solved.exp3->attacker, solved.exp3->defender));
  }
  return out;
}

int cmd_place(const RunConfig& cfg) {
  const Grid grid = read_grid(cfg);
  const PlacementResult r = optimal_placement(grid, cfg.zib);
  const ObservabilityVector g = effective_observability(grid, r.placement, cfg.zib);
  std::cout << "pmu buses:";
  for (BusId b : r.placement.pmu_buses) std::cout << ' ' << b;
  std::cout << "\ncost: " << r.cost << "\nobserved: " << g.observed_count() << "/" << grid.bus_count()
            << (cfg.zib ? " (zib rule)" : "") << "\n";
  write_file(cfg, "placement.json", placement_to_json(r));
  return kOk;
}

int cmd_game(const RunConfig& cfg) {
  const Scenario s = scenario_for(cfg, cfg.zib);
  std::cout << "attacks: " << s.matrix.rows() << "\ndefenses:";
  for (BusId b : s.defenses) std::cout << ' ' << b;
  std::cout << "\n";
  write_file(cfg, "matrix.csv", s.matrix.to_csv());
  return kOk;
}

int cmd_solve(const RunConfig& cfg) {
  const Scenario s = scenario_for(cfg, cfg.zib);
  const Solved solved = solve(cfg, s);
  const auto reports = reports_for(cfg, s, solved);

  if (cfg.solver == "both") {
    print_side_by_side(s.matrix, *solved.lp, *solved.exp3);
    std::cout << "lp value " << solved.lp->value << ", exp3 value " << solved.exp3->value
              << ", exp3 exploitability " << solved.exp3->exploitability << "\n";
  } else {
    std::cout << report_to_text(reports);
  }

  const auto att = attack_labels(s.matrix);
  const auto def = defense_labels(s.matrix);
  if (solved.lp && cfg.solver != "exp3") {
    const auto& r = *solved.lp;
    write_file(cfg, "lp_attacker.json", strategy_to_json(att, r.attacker, r.value, r.gap, 0, cfg.seed));
    write_file(cfg, "lp_defender.json", strategy_to_json(def, r.defender, r.value, r.gap, 0, cfg.seed));
  }
  if (solved.exp3) {
    const auto& r = *solved.exp3;
    write_file(cfg, "exp3_attacker.json",
               strategy_to_json(att, r.attacker, r.value, r.exploitability, r.iterations, r.seed));
    write_file(cfg, "exp3_defender.json",
               strategy_to_json(def, r.defender, r.value, r.exploitability, r.iterations, r.seed));
    write_file(cfg, "exp3_trace.csv", trace_to_csv(r.trace));
  }
  write_file(cfg, "report.json", report_to_json(reports));
  check_strict(cfg, solved);
  return kOk;
}

int cmd_evaluate(const RunConfig& cfg) {
  const Scenario s = scenario_for(cfg, cfg.zib);
  const Solved solved = solve(cfg, s);
  const auto reports = reports_for(cfg, s, solved);
  const std::string text = report_to_text(reports);
  std::cout << text;
  write_file(cfg, "report.json", report_to_json(reports));
  write_file(cfg, "report.txt", text);
  write_file(cfg, "rates.csv", report_to_csv(reports));
  check_strict(cfg, solved);
  return kOk;
}

int cmd_report(const RunConfig& cfg) {
  std::vector<DetectionReport> all;
  std::vector<Solved> runs;
  for (bool zib : {false, true}) {
    const Scenario s = scenario_for(cfg, zib);
    runs.push_back(solve(cfg, s));
    for (auto& r : reports_for(cfg, s, runs.back())) all.push_back(std::move(r));
  }
  const std::string text = report_to_text(all);
  std::cout << text;
  write_file(cfg, "report.json", report_to_json(all));
  write_file(cfg, "report.txt", text);
  write_file(cfg, "rates.csv", report_to_csv(all));
  for (const auto& run : runs) check_strict(cfg, run);
  return kOk;
}

void add_common(CLI::App* sub, RunConfig& cfg, bool zib_flag, bool attack_flags) {
  sub->add_option("--grid", cfg.grid, "grid file (JSON)")->capture_default_str();
  sub->add_option("--out", cfg.out, "output directory (default $PMUGAME_OUT or ./pmugame-out)");
  if (zib_flag) sub->add_flag("--zib", cfg.zib, "use zero-injection buses for observability");
  if (!attack_flags) return;
  sub->add_option("--eps-theta", cfg.eps_theta, "angle bias in radians");
  sub->add_option("--eps-flow", cfg.eps_flow, "flow bias");
  sub->add_option("--norm", cfg.norm, "attack-effect norm: l1, l2, linf");
  sub->add_option("--flow-bias", cfg.flow_bias, "absolute or proportional");
}

void add_solver(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--solver", cfg.solver, "lp, exp3 or both")->capture_default_str();
  sub->add_option("--iters", cfg.iters, "EXP3 iterations")->capture_default_str();
  sub->add_option("--seed", cfg.seed, "EXP3 seed")->capture_default_str();
  sub->add_flag("--strict", cfg.strict, "fail with exit 4 if EXP3 exploitability exceeds the bound");
  sub->add_option("--max-exploitability", cfg.max_exploitability,
                  "strict bound as a fraction of the LP game value")
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PMU placement game: placement, game construction, equilibria and detection rates"};
  app.require_subcommand(1);
  RunConfig cfg;
  cfg.out = default_out();

  auto* place = app.add_subcommand("place", "optimal PMU placement");
  add_common(place, cfg, true, false);
  auto* game = app.add_subcommand("game", "export the payoff matrix");
  add_common(game, cfg, true, true);
  auto* solve_cmd = app.add_subcommand("solve", "solve the game with LP and/or EXP3");
  add_common(solve_cmd, cfg, true, true);
  add_solver(solve_cmd, cfg);
  auto* evaluate = app.add_subcommand("evaluate", "detection rates for one scenario");
  add_common(evaluate, cfg, true, true);
  add_solver(evaluate, cfg);
  auto* report = app.add_subcommand("report", "detection report for both scenarios");
  add_common(report, cfg, false, true);
  add_solver(report, cfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInput;
  }

  try {
    check_config(cfg);
    if (place->parsed()) return cmd_place(cfg);
    if (game->parsed()) return cmd_game(cfg);
    if (solve_cmd->parsed()) return cmd_solve(cfg);
    if (evaluate->parsed()) return cmd_evaluate(cfg);
    return cmd_report(cfg);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  } catch (const StrictFailure& e) {
    std::cerr << "strict: " << e.what() << "\n";
    return kStrict;
  } catch (const std::exception& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kSolver;
  }
}
