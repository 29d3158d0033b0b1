#include "doctest.h"

#include <random>

#include "pmugame/grid.hpp"
#include "support.hpp"

using namespace pmugame;
using testsupport::fixture;

namespace {

const char* kTwoBus = R"({
  "buses": [ { "id": 1, "injection": 1.0, "zib": false },
             { "id": 2, "injection": -1.0, "zib": false } ],
  "lines": [ { "from": 1, "to": 2, "x": 0.1 } ],
  "slack": 2
})";

std::string four_bus_with(const std::string& lines) {
  return R"({
  "buses": [ { "id": 1, "injection": 0.8, "zib": false },
             { "id": 2, "injection": -0.3, "zib": false },
             { "id": 3, "injection": 0.0, "zib": true },
             { "id": 4, "injection": -0.5, "zib": false } ],
  "lines": [)" + lines + R"(],
  "slack": 1
})";
}

// theta from B theta = P with the slack row and column removed, solved by
// hand-rolled elimination.
std::vector<double> oracle_angles(const Grid& g) {
  const std::size_t n = g.bus_count();
  std::vector<std::vector<double>> b(n, std::vector<double>(n, 0.0));
  for (const auto& l : g.lines()) {
    const double y = 1.0 / l.reactance;
    const auto i = static_cast<std::size_t>(l.from - 1);
    const auto j = static_cast<std::size_t>(l.to - 1);
    b[i][i] += y;
    b[j][j] += y;
    b[i][j] -= y;
    b[j][i] -= y;
  }
  const auto s = static_cast<std::size_t>(g.slack() - 1);
  std::vector<std::vector<double>> a;
  std::vector<double> p;
  for (std::size_t i = 0; i < n; ++i) {
    if (i == s) continue;
    std::vector<double> row;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != s) row.push_back(b[i][j]);
    }
    a.push_back(row);
    p.push_back(g.buses()[i].injection);
  }
  const auto x = testsupport::gauss_solve(a, p);
  std::vector<double> theta(n, 0.0);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i != s) theta[i] = x[k++];
  }
  return theta;
}

}  // namespace

TEST_CASE("load the four-bus fixture") {
  const Grid g = load_grid_file(fixture("fourbus.grid"));
  CHECK(g.bus_count() == 4);
  CHECK(g.line_count() == 4);
  CHECK(g.zib_buses() == BusSet{3});
  CHECK(g.adjacency(1) == BusSet{2, 3});
  CHECK(g.slack() == 1);
  CHECK(g.pmu_weight(3) == 1.0);
}

TEST_CASE("load the IEEE 14-bus fixture") {
  const Grid g = load_grid_file(fixture("ieee14.grid"));
  CHECK(g.bus_count() == 14);
  CHECK(g.line_count() == 20);
  CHECK(g.zib_buses() == BusSet{7});
  CHECK(g.adjacency(7) == BusSet{4, 8, 9});
  CHECK(g.degree(2) == 4);
  CHECK(g.degree(6) == 4);
  CHECK(g.degree(7) == 3);
  CHECK(g.degree(9) == 4);
}

TEST_CASE("single line adjacency") {
  const Grid g = load_grid(kTwoBus);
  CHECK(g.adjacency(1) == BusSet{2});
  CHECK(g.adjacency(2) == BusSet{1});
  CHECK_THROWS(g.adjacency(3));
}

TEST_CASE("validation errors") {
  CHECK_THROWS_AS(load_grid(four_bus_with(R"({"from":1,"to":2,"x":0.0},{"from":1,"to":3,"x":0.2},
      {"from":2,"to":4,"x":0.1},{"from":3,"to":4,"x":0.1})")),
                  ValidationError);
  SUBCASE("disconnected") {
    CHECK_THROWS_AS(load_grid(four_bus_with(R"({"from":1,"to":2,"x":0.1},{"from":3,"to":4,"x":0.1})")),
                    ValidationError);
  }
  SUBCASE("duplicate line") {
    CHECK_THROWS_AS(load_grid(four_bus_with(R"({"from":1,"to":2,"x":0.1},{"from":2,"to":1,"x":0.1},
        {"from":1,"to":3,"x":0.1},{"from":3,"to":4,"x":0.1})")),
                    ValidationError);
  }
  SUBCASE("self loop") {
    CHECK_THROWS_AS(load_grid(four_bus_with(R"({"from":1,"to":1,"x":0.1},{"from":1,"to":2,"x":0.1},
        {"from":1,"to":3,"x":0.1},{"from":3,"to":4,"x":0.1})")),
                    ValidationError);
  }
  SUBCASE("unknown endpoint") {
    CHECK_THROWS_AS(load_grid(four_bus_with(R"({"from":1,"to":5,"x":0.1},{"from":1,"to":2,"x":0.1},
        {"from":1,"to":3,"x":0.1},{"from":3,"to":4,"x":0.1})")),
                    ValidationError);
  }
  SUBCASE("zib with injection") {
    CHECK_THROWS_AS(Grid({{1, 0.5, false}, {2, 0.5, true}}, {{1, 2, 0.1}}, 1), ValidationError);
  }
  SUBCASE("bad slack") {
    CHECK_THROWS_AS(Grid({{1, 0.5, false}, {2, -0.5, false}}, {{1, 2, 0.1}}, 3), ValidationError);
  }
  SUBCASE("negative weight") {
    CHECK_THROWS_AS(Grid({{1, 0.5, false}, {2, -0.5, false}}, {{1, 2, 0.1}}, 1, {1.0, -1.0}),
                    ValidationError);
  }
}

TEST_CASE("parse errors carry a location") {
  try {
    load_grid("{\n  \"buses\": [\n  oops ]\n}");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.location().find("line 3") != std::string::npos);
  }
  try {
    load_grid(R"({"buses": [{"id": 1, "injection": "x", "zib": false}], "lines": [], "slack": 1})");
    FAIL("expected a schema error");
  } catch (const ParseError& e) {
    CHECK(e.location().find("/buses/0") != std::string::npos);
  }
  CHECK_THROWS_AS(load_grid(R"({"lines": [], "slack": 1})"), ParseError);
  CHECK_THROWS_AS(load_grid_file(fixture("no-such.grid")), ParseError);
}

TEST_CASE("two-bus DC flow") {
  const Grid g = load_grid(kTwoBus);
  const BaseState s = dc_power_flow(g);
  CHECK(s.flows[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s.angle(1) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(s.angle(2) == 0.0);
  CHECK(s.flow(g, 2, 1) == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("zero injections give a flat profile") {
  const Grid g({{1, 0.0, false}, {2, 0.0, true}, {3, 0.0, false}}, {{1, 2, 0.1}, {2, 3, 0.3}, {1, 3, 0.2}}, 2);
  const BaseState s = dc_power_flow(g);
  for (double t : s.theta) CHECK(t == 0.0);
  for (double p : s.flows) CHECK(p == 0.0);
}

TEST_CASE("14-bus DC flow matches elimination oracle") {
  const Grid g = load_grid_file(fixture("ieee14.grid"));
  const BaseState s = dc_power_flow(g);
  const auto theta = oracle_angles(g);
  for (std::size_t i = 0; i < theta.size(); ++i) CHECK(s.theta[i] == doctest::Approx(theta[i]).epsilon(1e-9));
  for (std::size_t k = 0; k < g.line_count(); ++k) {
    const auto& l = g.lines()[k];
    const double p = (theta[static_cast<std::size_t>(l.from - 1)] - theta[static_cast<std::size_t>(l.to - 1)]) / l.reactance;
    CHECK(std::abs(s.flows[k] - p) <= 1e-6);
  }
}

TEST_CASE("propagate_angle") {
  CHECK(propagate_angle(0.1, 1.0, 0.1) == doctest::Approx(0.0));
  CHECK(propagate_angle(0.5, 0.0, 0.2) == 0.5);
  CHECK(propagate_angle(0.0, -2.0, 0.05) == doctest::Approx(0.1));
  static_assert(propagate_angle(1.0, 2.0, 0.25) == 0.5);
}

TEST_CASE("property: random grids satisfy round trip, KCL and symmetry") {
  std::mt19937_64 rng(20240611);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = testsupport::pick(rng, 2, 16);
    const Grid g = testsupport::random_grid(rng, n, testsupport::pick(rng, 0, n));
    const BaseState s = dc_power_flow(g);
    CHECK(s.angle(g.slack()) == 0.0);

    const auto theta = oracle_angles(g);
    for (int i = 0; i < n; ++i) CHECK(std::abs(s.theta[static_cast<std::size_t>(i)] - theta[static_cast<std::size_t>(i)]) < 1e-9);

    for (std::size_t k = 0; k < g.line_count(); ++k) {
      const auto& l = g.lines()[k];
      CHECK(std::abs(propagate_angle(s.angle(l.from), s.flows[k], l.reactance) - s.angle(l.to)) < 1e-9);
      CHECK(std::abs(propagate_angle(s.angle(l.to), s.flow(g, l.to, l.from), l.reactance) - s.angle(l.from)) < 1e-9);
    }
    for (const auto& b : g.buses()) {
      if (b.id == g.slack()) continue;
      double out = 0.0;
      for (BusId k : g.adjacency(b.id)) out += s.flow(g, b.id, k);
      CHECK(std::abs(out - b.injection) < 1e-9);
    }
    for (BusId i = 1; i <= n; ++i) {
      for (BusId j : g.adjacency(i)) {
        CHECK(j != i);
        const auto& back = g.adjacency(j);
        CHECK(std::binary_search(back.begin(), back.end(), i));
      }
    }
  }
}
