#include "pmugame/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

#include "pmugame/simplex.hpp"

namespace pmugame {

MixedStrategy::MixedStrategy(std::vector<double> probabilities) : p_(std::move(probabilities)) {
  if (p_.empty()) throw std::invalid_argument("mixed strategy over an empty action set");
  double sum = 0.0;
  for (double x : p_) {
    if (!(x >= 0.0) || !std::isfinite(x)) {
      throw std::invalid_argument("mixed strategy has a negative or non-finite entry");
    }
    sum += x;
  }
  if (std::abs(sum - 1.0) > kTolerance) {
    throw std::invalid_argument("mixed strategy sums to " + std::to_string(sum));
  }
}

MixedStrategy MixedStrategy::uniform(std::size_t n) {
  if (n == 0) throw std::invalid_argument("uniform strategy over an empty action set");
  return MixedStrategy(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

MixedStrategy MixedStrategy::pure(std::size_t n, std::size_t index) {
  if (index >= n) throw std::out_of_range("pure strategy index out of range");
  std::vector<double> p(n, 0.0);
  p[index] = 1.0;
  return MixedStrategy(std::move(p));
}

MixedStrategy MixedStrategy::from_weights(std::vector<double> weights) {
  double sum = 0.0;
  for (double& w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw std::invalid_argument("strategy weights must be finite and nonnegative");
    }
    sum += w;
  }
  if (!(sum > 0.0)) throw std::invalid_argument("strategy weights sum to zero");
  for (double& w : weights) w /= sum;
  return MixedStrategy(std::move(weights));
}

std::vector<std::size_t> MixedStrategy::support(double threshold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < p_.size(); ++i) {
    if (p_[i] > threshold) out.push_back(i);
  }
  return out;
}

namespace {

void check_dims(const Eigen::MatrixXd& f, const MixedStrategy& a, const MixedStrategy& d) {
  if (static_cast<std::size_t>(f.rows()) != a.size() ||
      static_cast<std::size_t>(f.cols()) != d.size()) {
    throw std::invalid_argument("strategy dimensions do not match the payoff matrix (" +
                                std::to_string(f.rows()) + "x" + std::to_string(f.cols()) +
                                " vs " + std::to_string(a.size()) + "/" +
                                std::to_string(d.size()) + ")");
  }
}

// Clip solver noise and renormalise onto the simplex.
MixedStrategy project(const Eigen::VectorXd& raw) {
  std::vector<double> w(static_cast<std::size_t>(raw.size()));
  for (Eigen::Index i = 0; i < raw.size(); ++i) {
    w[static_cast<std::size_t>(i)] = std::max(0.0, raw(i));
  }
  return MixedStrategy::from_weights(std::move(w));
}

}  // namespace

double expected_payoff(const Eigen::MatrixXd& payoffs, const MixedStrategy& attacker,
                       const MixedStrategy& defender) {
  check_dims(payoffs, attacker, defender);
  return attacker.vector().dot(payoffs * defender.vector());
}

double expected_payoff(const PayoffMatrix& m, const MixedStrategy& attacker,
                       const MixedStrategy& defender) {
  return expected_payoff(m.attacker_payoffs(), attacker, defender);
}

double exploitability(const Eigen::MatrixXd& payoffs, const MixedStrategy& attacker,
                      const MixedStrategy& defender) {
  check_dims(payoffs, attacker, defender);
  const double best_attack = (payoffs * defender.vector()).maxCoeff();
  const double best_defense = (attacker.vector().transpose() * payoffs).minCoeff();
  return std::max(0.0, best_attack - best_defense);
}

double exploitability(const PayoffMatrix& m, const MixedStrategy& attacker,
                      const MixedStrategy& defender) {
  return exploitability(m.attacker_payoffs(), attacker, defender);
}

EquilibriumResult solve_minimax(const Eigen::MatrixXd& payoffs) {
  const Eigen::Index rows = payoffs.rows();
  const Eigen::Index cols = payoffs.cols();
  if (rows == 0 || cols == 0) throw std::invalid_argument("empty payoff matrix");

  EquilibriumResult result;
  const double lo = payoffs.minCoeff();
  const double range = payoffs.maxCoeff() - lo;
  if (range == 0.0) {
    result.attacker = MixedStrategy::uniform(static_cast<std::size_t>(rows));
    result.defender = MixedStrategy::uniform(static_cast<std::size_t>(cols));
    result.value = result.lower_value = result.upper_value = lo;
    result.primal_value = result.dual_value = lo;
    return result;
  }

  // Affine map onto [1, 2] keeps the game value positive without changing
  // either player's optimal strategies. The defender's program is
  //   max 1'y  s.t.  G y <= 1,  y >= 0      (mu = y / 1'y, v' = 1 / 1'y)
  // and its dual gives the attacker's weights.
  const Eigen::MatrixXd shifted = (payoffs.array() - lo) / range + 1.0;
  const LpSolution lp = solve_canonical_lp(shifted, Eigen::VectorXd::Ones(rows),
                                           Eigen::VectorXd::Ones(cols));
  if (lp.status != LpStatus::Optimal) {
    throw std::runtime_error("minimax LP did not reach optimality");
  }
  const double primal_sum = lp.primal.sum();
  const double dual_sum = lp.dual.sum();
  if (!(primal_sum > 0.0) || !(dual_sum > 0.0)) {
    throw std::runtime_error("minimax LP returned a degenerate solution");
  }
  auto to_payoff = [&](double shifted_value) { return (shifted_value - 1.0) * range + lo; };

  result.defender = project(lp.primal);
  result.attacker = project(lp.dual);
  result.primal_value = to_payoff(1.0 / primal_sum);
  result.dual_value = to_payoff(1.0 / dual_sum);
  result.upper_value = (payoffs * result.defender.vector()).maxCoeff();
  result.lower_value = (result.attacker.vector().transpose() * payoffs).minCoeff();
  result.value = expected_payoff(payoffs, result.attacker, result.defender);
  result.gap = std::max(0.0, result.upper_value - result.lower_value);
  result.pivots = lp.pivots;
  return result;
}

EquilibriumResult solve_minimax(const PayoffMatrix& m) { return solve_minimax(m.attacker_payoffs()); }

bool equilibrium_is_ambiguous(const Eigen::MatrixXd& payoffs, double tolerance) {
  const EquilibriumResult base = solve_minimax(payoffs);
  const double range = payoffs.maxCoeff() - payoffs.minCoeff();
  if (range == 0.0) return payoffs.size() > 1;
  std::mt19937_64 rng(0x5eedULL);
  std::uniform_real_distribution<double> noise(-1.0, 1.0);
  for (int trial = 0; trial < 4; ++trial) {
    Eigen::MatrixXd perturbed = payoffs;
    for (Eigen::Index i = 0; i < perturbed.size(); ++i) {
      perturbed.data()[i] += 1e-6 * range * noise(rng);
    }
    const EquilibriumResult alt = solve_minimax(perturbed);
    const double da = (alt.attacker.vector() - base.attacker.vector()).lpNorm<1>();
    const double dd = (alt.defender.vector() - base.defender.vector()).lpNorm<1>();
    if (da > tolerance || dd > tolerance) return true;
  }
  return false;
}

}  // namespace pmugame
