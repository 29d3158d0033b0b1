#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "pmugame/equilibrium.hpp"
#include "pmugame/game.hpp"

namespace pmugame {

enum class ScheduleKind {
  /// eta_t = min(1, c_eta * sqrt(ln K / (K t)))
  /// gamma_t = min(1, c_gamma * sqrt(K ln K / t))
  /// beta_t = c_beta / (K sqrt(t))
  Anytime,
  /// The Anytime formulas evaluated once at t = horizon and held fixed.
  Horizon,
  /// eta, gamma, beta held fixed at the given values.
  Constant,
};

struct Exp3Schedule {
  ScheduleKind kind = ScheduleKind::Anytime;
  double eta = 1.0;
  double gamma = 1.0;
  double beta = 1.0;
  std::size_t horizon = 0;  // Horizon kind only; self-play fills in its iteration count

  static Exp3Schedule constant(double eta, double gamma, double beta) {
    return {ScheduleKind::Constant, eta, gamma, beta, 0};
  }
  /// Horizon kind with multipliers (4, 0.5, 0.1); used by self-play unless
  /// overridden. The horizon is filled in from the iteration count.
  static Exp3Schedule selfplay_default() { return {ScheduleKind::Horizon, 4.0, 0.5, 0.1, 0}; }

  /// Throws std::invalid_argument on nonpositive parameters or a constant
  /// gamma outside (0, 1].
  void validate() const;
  double eta_at(std::size_t t, std::size_t actions) const;
  double gamma_at(std::size_t t, std::size_t actions) const;
  double beta_at(std::size_t t, std::size_t actions) const;
};

/// One bandit learner. `round` is the index t of the distribution about to
/// be played (starting at 1).
struct Exp3State {
  Exp3Schedule schedule;
  std::size_t round = 1;
  std::vector<double> scores;        // G_t
  std::vector<double> distribution;  // sigma_t
  std::vector<double> weighted_sum;  // sum_tau eta_tau sigma_tau
  double weight_total = 0.0;         // sum_tau eta_tau

  static Exp3State initial(std::size_t actions, Exp3Schedule schedule = {});

  std::size_t actions() const { return distribution.size(); }
  MixedStrategy current() const { return MixedStrategy(distribution); }
  /// Eta-weighted average of the distributions played so far; the current
  /// distribution before the first step.
  MixedStrategy empirical() const;
  std::size_t sample(std::mt19937_64& rng) const;
};

/// Advance one round: importance-weighted estimates
///   F_hat(a) = (reward * [a == chosen] + beta_t) / sigma_t(a),
/// scores G += eta_t * F_hat, next distribution
///   gamma_t / K + (1 - gamma_t) * softmax(G),
/// and sigma_t folded into the empirical average with weight eta_t.
/// Throws std::invalid_argument for a reward outside [0, 1] or a bad index.
Exp3State exp3_step(Exp3State state, std::size_t chosen, double reward);

struct TracePoint {
  std::size_t t = 0;
  double exploitability = 0.0;
  double value_estimate = 0.0;
};

struct SelfPlayOptions {
  std::size_t iterations = 200000;
  std::uint64_t seed = 42;
  Exp3Schedule attacker_schedule = Exp3Schedule::selfplay_default();
  Exp3Schedule defender_schedule = Exp3Schedule::selfplay_default();
  std::size_t trace_points = 100;
};

struct SelfPlayResult {
  MixedStrategy attacker;  // empirical frequencies
  MixedStrategy defender;
  double value = 0.0;  // expected payoff of the empirical profile
  double exploitability = 0.0;
  std::size_t iterations = 0;
  std::uint64_t seed = 0;
  std::vector<TracePoint> trace;
};

/// Two EXP3 learners play each other for `iterations` rounds, each seeing
/// only its own realised reward. The attacker's reward is the payoff mapped
/// affinely onto [0, 1] by the matrix range; the defender receives one minus
/// that.
SelfPlayResult exp3_selfplay(const Eigen::MatrixXd& payoffs, const SelfPlayOptions& options);
SelfPlayResult exp3_selfplay(const PayoffMatrix& m, const SelfPlayOptions& options);

std::string trace_to_csv(const std::vector<TracePoint>& trace);

}  // namespace pmugame
