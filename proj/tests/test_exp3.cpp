#include "doctest.h"

#include <random>

#include "pmugame/evaluation.hpp"
#include "pmugame/exp3.hpp"
#include "support.hpp"

using namespace pmugame;
using testsupport::fixture;

namespace {

Exp3State state_with(std::vector<double> sigma, Exp3Schedule schedule) {
  Exp3State s = Exp3State::initial(sigma.size(), schedule);
  s.distribution = std::move(sigma);
  return s;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

TEST_CASE("schedules") {
  const Exp3Schedule any;
  CHECK(any.eta_at(4, 3) == doctest::Approx(std::sqrt(std::log(3.0) / 12.0)));
  CHECK(any.gamma_at(400, 3) == doctest::Approx(std::sqrt(3.0 * std::log(3.0) / 400.0)));
  CHECK(any.gamma_at(1, 3) == 1.0);
  CHECK(any.beta_at(9, 3) == doctest::Approx(1.0 / 9.0));
  CHECK(any.eta_at(1, 1) == doctest::Approx(std::sqrt(std::log(2.0))));

  Exp3Schedule h{ScheduleKind::Horizon, 2.0, 0.5, 0.1, 1000};
  CHECK(h.eta_at(1, 5) == h.eta_at(999, 5));
  CHECK(h.eta_at(3, 5) == doctest::Approx(2.0 * std::sqrt(std::log(5.0) / 5000.0)));

  const auto c = Exp3Schedule::constant(0.1, 0.2, 0.3);
  CHECK(c.eta_at(10, 4) == 0.1);
  CHECK(c.gamma_at(10, 4) == 0.2);
  CHECK(c.beta_at(10, 4) == 0.3);

  CHECK_THROWS_AS(Exp3Schedule::constant(0.0, 0.5, 0.1).validate(), std::invalid_argument);
  CHECK_THROWS_AS(Exp3Schedule::constant(0.1, 1.5, 0.1).validate(), std::invalid_argument);
  CHECK_THROWS_AS(Exp3Schedule::constant(0.1, 0.5, -1.0).validate(), std::invalid_argument);
  CHECK_THROWS_AS((Exp3Schedule{ScheduleKind::Horizon, 1.0, 1.0, 1.0, 0}).validate(), std::invalid_argument);
}

TEST_CASE("one step by hand") {
  const Exp3State s0 = Exp3State::initial(3, Exp3Schedule::constant(0.1, 0.3, 0.01));
  const Exp3State s1 = exp3_step(s0, 1, 0.6);
  const double third = 1.0 / 3.0;
  const std::vector<double> fhat{0.01 / third, 0.61 / third, 0.01 / third};
  std::vector<double> g(3);
  double z = 0.0;
  for (int a = 0; a < 3; ++a) {
    g[static_cast<std::size_t>(a)] = 0.1 * fhat[static_cast<std::size_t>(a)];
    z += std::exp(g[static_cast<std::size_t>(a)]);
  }
  for (std::size_t a = 0; a < 3; ++a) {
    CHECK(s1.scores[a] == doctest::Approx(g[a]).epsilon(1e-12));
    CHECK(s1.distribution[a] == doctest::Approx(0.1 + 0.7 * std::exp(g[a]) / z).epsilon(1e-12));
    CHECK(s1.weighted_sum[a] == doctest::Approx(0.1 * third));
  }
  CHECK(s1.round == 2);
  CHECK(s1.weight_total == doctest::Approx(0.1));
  CHECK(s1.empirical()[0] == doctest::Approx(third));
}

TEST_CASE("estimator is unbiased by exhaustive summation") {
  const std::vector<double> sigma{0.2, 0.5, 0.3};
  const std::vector<double> reward{0.9, 0.1, 0.4};
  const double eta = 0.05;
  const double beta = 0.02;
  const Exp3State s = state_with(sigma, Exp3Schedule::constant(eta, 0.1, beta));
  for (std::size_t a = 0; a < 3; ++a) {
    double expected = 0.0;
    for (std::size_t b = 0; b < 3; ++b) {
      const Exp3State next = exp3_step(s, b, reward[b]);
      const double fhat = (next.scores[a] - s.scores[a]) / eta;
      // Remove the deterministic bias term so what remains is the beta = 0 estimator.
      expected += sigma[b] * (fhat - beta / sigma[a]);
    }
    CHECK(expected == doctest::Approx(reward[a]).epsilon(1e-12));
  }
}

TEST_CASE("step errors") {
  const Exp3State s = Exp3State::initial(3, Exp3Schedule::constant(0.1, 0.3, 0.01));
  CHECK_THROWS_AS(exp3_step(s, 1, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(exp3_step(s, 1, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(exp3_step(s, 3, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(exp3_step(state_with({1.0, 0.0, 0.0}, Exp3Schedule::constant(0.1, 0.3, 0.01)), 1, 0.5),
                  std::logic_error);
  CHECK_THROWS_AS(Exp3State::initial(0), std::invalid_argument);
}

TEST_CASE("sampling follows the distribution") {
  const Exp3State s = state_with({0.1, 0.6, 0.3}, Exp3Schedule::constant(0.1, 0.3, 0.01));
  std::mt19937_64 rng(3);
  std::vector<int> count(3, 0);
  const int n = 200000;
  for (int i = 0; i < n; ++i) ++count[s.sample(rng)];
  for (std::size_t a = 0; a < 3; ++a) {
    const double p = s.distribution[a];
    CHECK(std::abs(count[a] / static_cast<double>(n) - p) < 5.0 * std::sqrt(p * (1 - p) / n));
  }
}

TEST_CASE("property: distributions stay on the simplex") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const auto k = static_cast<std::size_t>(testsupport::pick(rng, 1, 12));
    Exp3Schedule sched;
    if (trial % 3 == 1) sched = Exp3Schedule::constant(testsupport::uniform(rng, 0.01, 1.0), testsupport::uniform(rng, 0.01, 1.0), 1e-3);
    if (trial % 3 == 2) sched = Exp3Schedule{ScheduleKind::Horizon, 4.0, 0.5, 0.1, 500};
    Exp3State s = Exp3State::initial(k, sched);
    for (int t = 0; t < 500; ++t) {
      const std::size_t a = s.sample(rng);
      s = exp3_step(std::move(s), a, testsupport::uniform(rng, 0.0, 1.0));
      double sum = 0.0;
      const double floor = s.schedule.gamma_at(s.round - 1, k) / static_cast<double>(k);
      for (double p : s.distribution) {
        CHECK(p >= floor * (1 - 1e-12));
        sum += p;
      }
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK(s.empirical().vector().sum() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("matching pennies self-play") {
  Eigen::MatrixXd f(2, 2);
  f << 1, -1, -1, 1;
  SelfPlayOptions opt;
  opt.iterations = 100000;
  opt.seed = 42;
  const auto r = exp3_selfplay(f, opt);
  CHECK(std::abs(r.attacker[0] - 0.5) <= 0.05);
  CHECK(std::abs(r.defender[0] - 0.5) <= 0.05);
}

TEST_CASE("one iteration stays uniform") {
  const Scenario s = build_scenario(load_grid_file(fixture("ieee14.grid")), false);
  SelfPlayOptions opt;
  opt.iterations = 1;
  opt.seed = 7;
  const auto r = exp3_selfplay(s.matrix, opt);
  for (std::size_t a = 0; a < r.attacker.size(); ++a) CHECK(r.attacker[a] == doctest::Approx(1.0 / 108.0));
  for (std::size_t d = 0; d < r.defender.size(); ++d) CHECK(r.defender[d] == doctest::Approx(0.2));
}

TEST_CASE("self-play is reproducible and traced") {
  const Scenario s = build_scenario(load_grid_file(fixture("ieee14.grid")), false);
  SelfPlayOptions opt;
  opt.iterations = 5000;
  opt.trace_points = 10;
  const auto a = exp3_selfplay(s.matrix, opt);
  const auto b = exp3_selfplay(s.matrix, opt);
  CHECK(a.attacker.probabilities() == b.attacker.probabilities());
  CHECK(a.defender.probabilities() == b.defender.probabilities());
  CHECK(trace_to_csv(a.trace) == trace_to_csv(b.trace));
  REQUIRE(a.trace.size() == 10);
  CHECK(a.trace.back().t == 5000);
  CHECK(trace_to_csv(a.trace).rfind("t,exploitability,value_estimate\n", 0) == 0);
  opt.seed = 43;
  CHECK(exp3_selfplay(s.matrix, opt).attacker.probabilities() != a.attacker.probabilities());
  opt.iterations = 0;
  CHECK_THROWS_AS(exp3_selfplay(s.matrix, opt), std::invalid_argument);
}

TEST_CASE("14-bus self-play approaches the LP equilibrium") {
  const Scenario s = build_scenario(load_grid_file(fixture("ieee14.grid")), false);
  const auto lp = solve_minimax(s.matrix);
  SelfPlayOptions opt;
  const auto r = exp3_selfplay(s.matrix, opt);
  CHECK(std::abs(r.value - lp.value) <= 0.05 * lp.value);
  CHECK(r.attacker.support(0.05) == lp.attacker.support(1e-6));
  CHECK(r.defender.support(0.05) == lp.defender.support(1e-6));
}

TEST_CASE("property: exploitability shrinks with more rounds") {
  const Scenario s = build_scenario(load_grid_file(fixture("ieee14.grid")), false);
  std::vector<double> short_run, long_run;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    SelfPlayOptions opt;
    opt.seed = seed;
    opt.trace_points = 0;
    opt.iterations = 1000;
    short_run.push_back(exp3_selfplay(s.matrix, opt).exploitability);
    opt.iterations = 100000;
    long_run.push_back(exp3_selfplay(s.matrix, opt).exploitability);
  }
  CHECK(median(long_run) < median(short_run));
}
