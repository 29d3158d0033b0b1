#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

#include "pmugame/game.hpp"

namespace pmugame {

/// A probability distribution over a finite, ordered action set.
class MixedStrategy {
 public:
  static constexpr double kTolerance = 1e-9;

  MixedStrategy() = default;
  /// Throws std::invalid_argument unless entries are >= 0 and sum to 1
  /// within kTolerance.
  explicit MixedStrategy(std::vector<double> probabilities);

  static MixedStrategy uniform(std::size_t n);
  static MixedStrategy pure(std::size_t n, std::size_t index);
  /// Normalises nonnegative weights with a positive sum.
  static MixedStrategy from_weights(std::vector<double> weights);

  std::size_t size() const { return p_.size(); }
  double operator[](std::size_t i) const { return p_[i]; }
  const std::vector<double>& probabilities() const { return p_; }
  Eigen::Map<const Eigen::VectorXd> vector() const {
    return {p_.data(), static_cast<Eigen::Index>(p_.size())};
  }
  /// Indices carrying more than `threshold` probability.
  std::vector<std::size_t> support(double threshold = 1e-9) const;

 private:
  std::vector<double> p_;
};

/// sum_a sum_d F(a,d) rho_a mu_d. Throws std::invalid_argument on a
/// dimension mismatch.
double expected_payoff(const Eigen::MatrixXd& payoffs, const MixedStrategy& attacker,
                       const MixedStrategy& defender);
double expected_payoff(const PayoffMatrix& m, const MixedStrategy& attacker,
                       const MixedStrategy& defender);

/// Best-response gap  max_a (F mu)_a - min_d (rho' F)_d  (zero exactly at an
/// equilibrium of the zero-sum game).
double exploitability(const Eigen::MatrixXd& payoffs, const MixedStrategy& attacker,
                      const MixedStrategy& defender);
double exploitability(const PayoffMatrix& m, const MixedStrategy& attacker,
                      const MixedStrategy& defender);

struct EquilibriumResult {
  MixedStrategy attacker;
  MixedStrategy defender;
  double value = 0.0;        // attacker's expected payoff at the profile
  double lower_value = 0.0;  // min_d (rho' F)_d: what the attacker guarantees
  double upper_value = 0.0;  // max_a (F mu)_a: what the defender concedes
  double primal_value = 0.0; // defender LP optimum, mapped back to payoff units
  double dual_value = 0.0;   // attacker LP optimum (dual), same units
  double gap = 0.0;          // upper_value - lower_value
  std::size_t pivots = 0;
};

/// Mixed equilibrium of the zero-sum game where the row player maximises F
/// and the column player minimises it, via the minimax linear program.
/// Throws std::runtime_error if the LP solver fails.
EquilibriumResult solve_minimax(const Eigen::MatrixXd& payoffs);
EquilibriumResult solve_minimax(const PayoffMatrix& m);

/// True when small deterministic perturbations of the payoffs move the LP
/// equilibrium by more than `tolerance` (L1), which indicates a degenerate
/// game with several equilibria.
bool equilibrium_is_ambiguous(const Eigen::MatrixXd& payoffs, double tolerance = 1e-3);

}  // namespace pmugame
