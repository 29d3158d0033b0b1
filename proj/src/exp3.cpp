#include "pmugame/exp3.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

namespace pmugame {

namespace {

// ln K is zero for a single action; the learner is trivial there but the
// schedule must stay positive.
double log_actions(std::size_t k) { return std::log(static_cast<double>(std::max<std::size_t>(k, 2))); }

double unit_random(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

void Exp3Schedule::validate() const {
  if (!(eta > 0.0) || !(gamma > 0.0) || !(beta > 0.0) || !std::isfinite(eta) ||
      !std::isfinite(gamma) || !std::isfinite(beta)) {
    throw std::invalid_argument("EXP3 schedule parameters must be positive and finite");
  }
  if (kind == ScheduleKind::Constant && gamma > 1.0) {
    throw std::invalid_argument("EXP3 exploration rate gamma must lie in (0, 1]");
  }
  if (kind == ScheduleKind::Horizon && horizon == 0) {
    throw std::invalid_argument("EXP3 horizon schedule needs a positive horizon");
  }
}

double Exp3Schedule::eta_at(std::size_t t, std::size_t actions) const {
  if (kind == ScheduleKind::Constant) return eta;
  if (kind == ScheduleKind::Horizon) t = horizon;
  const double k = static_cast<double>(actions);
  return std::min(1.0, eta * std::sqrt(log_actions(actions) / (k * static_cast<double>(t))));
}

double Exp3Schedule::gamma_at(std::size_t t, std::size_t actions) const {
  if (kind == ScheduleKind::Constant) return gamma;
  if (kind == ScheduleKind::Horizon) t = horizon;
  const double k = static_cast<double>(actions);
  return std::min(1.0, gamma * std::sqrt(k * log_actions(actions) / static_cast<double>(t)));
}

double Exp3Schedule::beta_at(std::size_t t, std::size_t actions) const {
  if (kind == ScheduleKind::Constant) return beta;
  if (kind == ScheduleKind::Horizon) t = horizon;
  return beta / (static_cast<double>(actions) * std::sqrt(static_cast<double>(t)));
}

Exp3State Exp3State::initial(std::size_t actions, Exp3Schedule schedule) {
  if (actions == 0) throw std::invalid_argument("EXP3 needs at least one action");
  schedule.validate();
  Exp3State s;
  s.schedule = schedule;
  s.scores.assign(actions, 0.0);
  s.distribution.assign(actions, 1.0 / static_cast<double>(actions));
  s.weighted_sum.assign(actions, 0.0);
  return s;
}

MixedStrategy Exp3State::empirical() const {
  if (weight_total <= 0.0) return MixedStrategy::from_weights(distribution);
  return MixedStrategy::from_weights(weighted_sum);
}

std::size_t Exp3State::sample(std::mt19937_64& rng) const {
  const double u = unit_random(rng);
  double acc = 0.0;
  for (std::size_t a = 0; a < distribution.size(); ++a) {
    acc += distribution[a];
    if (u < acc) return a;
  }
  // Rounding left u above the cumulative total; fall back to the last action
  // with mass.
  for (std::size_t a = distribution.size(); a-- > 0;) {
    if (distribution[a] > 0.0) return a;
  }
  return distribution.size() - 1;
}

Exp3State exp3_step(Exp3State state, std::size_t chosen, double reward) {
  const std::size_t k = state.actions();
  if (chosen >= k) throw std::invalid_argument("EXP3 action index out of range");
  if (!(reward >= 0.0 && reward <= 1.0)) {
    throw std::invalid_argument("EXP3 reward must lie in [0, 1]");
  }
  if (!(state.distribution[chosen] > 0.0)) {
    throw std::logic_error("EXP3 chose an action with zero probability");
  }

  const std::size_t t = state.round;
  const double eta = state.schedule.eta_at(t, k);
  const double gamma = state.schedule.gamma_at(t, k);
  const double beta = state.schedule.beta_at(t, k);

  for (std::size_t a = 0; a < k; ++a) {
    state.weighted_sum[a] += eta * state.distribution[a];
  }
  state.weight_total += eta;

  for (std::size_t a = 0; a < k; ++a) {
    const double observed = a == chosen ? reward : 0.0;
    state.scores[a] += eta * (observed + beta) / state.distribution[a];
  }

  const double top = *std::max_element(state.scores.begin(), state.scores.end());
  double z = 0.0;
  std::vector<double> soft(k);
  for (std::size_t a = 0; a < k; ++a) {
    soft[a] = std::exp(state.scores[a] - top);
    z += soft[a];
  }
  const double floor = gamma / static_cast<double>(k);
  for (std::size_t a = 0; a < k; ++a) {
    state.distribution[a] = floor + (1.0 - gamma) * soft[a] / z;
  }
  state.round = t + 1;
  return state;
}

SelfPlayResult exp3_selfplay(const Eigen::MatrixXd& payoffs, const SelfPlayOptions& options) {
  if (options.iterations < 1) throw std::invalid_argument("self-play needs at least one iteration");
  if (payoffs.size() == 0) throw std::invalid_argument("empty payoff matrix");
  auto resolve = [&](Exp3Schedule s) {
    if (s.kind == ScheduleKind::Horizon && s.horizon == 0) s.horizon = options.iterations;
    s.validate();
    return s;
  };
  const Exp3Schedule attacker_schedule = resolve(options.attacker_schedule);
  const Exp3Schedule defender_schedule = resolve(options.defender_schedule);

  const auto rows = static_cast<std::size_t>(payoffs.rows());
  const auto cols = static_cast<std::size_t>(payoffs.cols());
  const double lo = payoffs.minCoeff();
  const double range = payoffs.maxCoeff() - lo;
  auto normalised = [&](std::size_t a, std::size_t d) {
    if (range <= 0.0) return 0.0;
    const double r = (payoffs(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(d)) - lo) / range;
    return std::clamp(r, 0.0, 1.0);
  };

  Exp3State attacker = Exp3State::initial(rows, attacker_schedule);
  Exp3State defender = Exp3State::initial(cols, defender_schedule);
  std::mt19937_64 rng(options.seed);

  SelfPlayResult result;
  result.iterations = options.iterations;
  result.seed = options.seed;
  const std::size_t points = std::max<std::size_t>(options.trace_points, 1);
  const std::size_t stride = std::max<std::size_t>(options.iterations / points, 1);

  for (std::size_t t = 1; t <= options.iterations; ++t) {
    const std::size_t a = attacker.sample(rng);
    const std::size_t d = defender.sample(rng);
    const double reward = normalised(a, d);
    attacker = exp3_step(std::move(attacker), a, reward);
    defender = exp3_step(std::move(defender), d, 1.0 - reward);

    if (options.trace_points > 0 && (t % stride == 0 || t == options.iterations)) {
      const auto sa = attacker.empirical();
      const auto sd = defender.empirical();
      result.trace.push_back({t, exploitability(payoffs, sa, sd), expected_payoff(payoffs, sa, sd)});
    }
  }

  result.attacker = attacker.empirical();
  result.defender = defender.empirical();
  result.value = expected_payoff(payoffs, result.attacker, result.defender);
  result.exploitability = exploitability(payoffs, result.attacker, result.defender);
  return result;
}

SelfPlayResult exp3_selfplay(const PayoffMatrix& m, const SelfPlayOptions& options) {
  return exp3_selfplay(m.attacker_payoffs(), options);
}

std::string trace_to_csv(const std::vector<TracePoint>& trace) {
  std::ostringstream out;
  out << "t,exploitability,value_estimate\n";
  char buf[64];
  for (const auto& p : trace) {
    out << p.t << ',';
    auto r = std::to_chars(buf, buf + sizeof(buf), p.exploitability);
    out << std::string_view(buf, static_cast<std::size_t>(r.ptr - buf)) << ',';
    r = std::to_chars(buf, buf + sizeof(buf), p.value_estimate);
    out << std::string_view(buf, static_cast<std::size_t>(r.ptr - buf)) << '\n';
  }
  return out.str();
}

}  // namespace pmugame
