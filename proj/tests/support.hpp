#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "pmugame/grid.hpp"

namespace testsupport {

inline std::string fixture(const std::string& name) { return std::string(PMUGAME_DATA_DIR) + "/" + name; }

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int pick(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

// Random connected grid: a random spanning tree plus extra lines. Roughly a
// third of the buses are ZIBs (never bus 1, which is the slack).
inline pmugame::Grid random_grid(std::mt19937_64& rng, int n, int extra_lines, bool weights = false) {
  using namespace pmugame;
  std::vector<Bus> buses;
  for (int i = 1; i <= n; ++i) {
    const bool zib = i > 1 && pick(rng, 0, 2) == 0;
    buses.push_back({i, zib ? 0.0 : uniform(rng, -1.0, 1.0), zib});
  }
  std::vector<std::pair<int, int>> edges;
  auto has = [&](int a, int b) {
    return std::find(edges.begin(), edges.end(), std::make_pair(std::min(a, b), std::max(a, b))) !=
           edges.end();
  };
  for (int i = 2; i <= n; ++i) {
    const int j = pick(rng, 1, i - 1);
    edges.emplace_back(j, i);
  }
  for (int k = 0; k < extra_lines; ++k) {
    const int a = pick(rng, 1, n);
    const int b = pick(rng, 1, n);
    if (a == b || has(a, b)) continue;
    edges.emplace_back(std::min(a, b), std::max(a, b));
  }
  std::vector<Line> lines;
  for (auto [a, b] : edges) lines.push_back({a, b, uniform(rng, 0.05, 0.5)});
  std::vector<double> w;
  if (weights) {
    for (int i = 0; i < n; ++i) w.push_back(static_cast<double>(pick(rng, 1, 3)));
  }
  return Grid(std::move(buses), std::move(lines), 1, std::move(w), "random");
}

// Plain Gaussian elimination with partial pivoting on a dense system.
inline std::vector<double> gauss_solve(std::vector<std::vector<double>> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    }
    std::swap(a[col], a[piv]);
    std::swap(b[col], b[piv]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r][col] / a[col][col];
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t c = i + 1; c < n; ++c) s -= a[i][c] * x[c];
    x[i] = s / a[i][i];
  }
  return x;
}

}  // namespace testsupport
