#include "pmugame/grid.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <queue>
#include <sstream>
#include <tuple>

#include "json.hpp"

namespace pmugame {

using nlohmann::json;

Grid::Grid(std::vector<Bus> buses, std::vector<Line> lines, BusId slack,
           std::vector<double> pmu_weights, std::string name)
    : name_(std::move(name)),
      buses_(std::move(buses)),
      lines_(std::move(lines)),
      slack_(slack),
      weights_(std::move(pmu_weights)) {
  const std::size_t n = buses_.size();
  if (n == 0) throw ValidationError("grid has no buses");

  std::sort(buses_.begin(), buses_.end(),
            [](const Bus& a, const Bus& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < n; ++i) {
    if (buses_[i].id != static_cast<BusId>(i + 1)) {
      throw ValidationError("bus ids must be exactly 1.." + std::to_string(n) +
                            " (found id " + std::to_string(buses_[i].id) + ")");
    }
    if (!std::isfinite(buses_[i].injection)) {
      throw ValidationError("bus " + std::to_string(buses_[i].id) +
                            ": injection is not finite");
    }
    if (buses_[i].zib && buses_[i].injection != 0.0) {
      throw ValidationError("bus " + std::to_string(buses_[i].id) +
                            ": zero-injection bus has nonzero injection");
    }
  }
  if (!contains(slack_)) {
    throw ValidationError("slack bus " + std::to_string(slack_) + " is not a bus");
  }

  if (weights_.empty()) weights_.assign(n, 1.0);
  if (weights_.size() != n) {
    throw ValidationError("pmu_weights has " + std::to_string(weights_.size()) +
                          " entries, expected " + std::to_string(n));
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!(weights_[i] >= 0.0) || !std::isfinite(weights_[i])) {
      throw ValidationError("bus " + std::to_string(i + 1) +
                            ": pmu weight must be finite and nonnegative");
    }
  }

  for (auto& line : lines_) {
    if (line.from > line.to) std::swap(line.from, line.to);
    const std::string tag =
        "line " + std::to_string(line.from) + "-" + std::to_string(line.to);
    if (!contains(line.from) || !contains(line.to)) {
      throw ValidationError(tag + ": endpoint is not a bus");
    }
    if (line.from == line.to) throw ValidationError(tag + ": self loop");
    if (!(line.reactance > 0.0) || !std::isfinite(line.reactance)) {
      throw ValidationError(tag + ": reactance must be positive");
    }
  }
  std::sort(lines_.begin(), lines_.end(), [](const Line& a, const Line& b) {
    return std::tie(a.from, a.to) < std::tie(b.from, b.to);
  });
  for (std::size_t k = 1; k < lines_.size(); ++k) {
    if (lines_[k].from == lines_[k - 1].from && lines_[k].to == lines_[k - 1].to) {
      throw ValidationError("duplicate line " + std::to_string(lines_[k].from) +
                            "-" + std::to_string(lines_[k].to));
    }
  }

  adjacency_.assign(n, {});
  incident_.assign(n, {});
  for (std::size_t k = 0; k < lines_.size(); ++k) {
    const auto& line = lines_[k];
    adjacency_[index(line.from)].push_back(line.to);
    adjacency_[index(line.to)].push_back(line.from);
    incident_[index(line.from)].push_back(k);
    incident_[index(line.to)].push_back(k);
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::sort(adjacency_[i].begin(), adjacency_[i].end());
    const BusId self = static_cast<BusId>(i + 1);
    std::sort(incident_[i].begin(), incident_[i].end(),
              [&](std::size_t a, std::size_t b) {
                return lines_[a].other(self) < lines_[b].other(self);
              });
  }

  std::vector<char> seen(n, 0);
  std::queue<std::size_t> frontier;
  frontier.push(0);
  seen[0] = 1;
  std::size_t reached = 1;
  while (!frontier.empty()) {
    const std::size_t i = frontier.front();
    frontier.pop();
    for (BusId j : adjacency_[i]) {
      if (!seen[index(j)]) {
        seen[index(j)] = 1;
        ++reached;
        frontier.push(index(j));
      }
    }
  }
  if (reached != n) {
    throw ValidationError("grid is disconnected (" + std::to_string(reached) +
                          " of " + std::to_string(n) + " buses reachable from bus 1)");
  }
}

std::size_t Grid::index(BusId id) const {
  if (!contains(id)) throw std::out_of_range("unknown bus id " + std::to_string(id));
  return static_cast<std::size_t>(id - 1);
}

const Bus& Grid::bus(BusId id) const { return buses_[index(id)]; }

const BusSet& Grid::adjacency(BusId id) const { return adjacency_[index(id)]; }

const std::vector<std::size_t>& Grid::incident_lines(BusId id) const {
  return incident_[index(id)];
}

BusSet Grid::zib_buses() const {
  BusSet out;
  for (const auto& b : buses_) {
    if (b.zib) out.push_back(b.id);
  }
  return out;
}

std::optional<std::size_t> Grid::line_between(BusId a, BusId b) const {
  if (!contains(a) || !contains(b)) return std::nullopt;
  for (std::size_t k : incident_[index(a)]) {
    if (lines_[k].other(a) == b) return k;
  }
  return std::nullopt;
}

double BaseState::flow(const Grid& grid, BusId at, BusId towards) const {
  const auto k = grid.line_between(at, towards);
  if (!k) {
    throw std::out_of_range("no line between " + std::to_string(at) + " and " +
                            std::to_string(towards));
  }
  const double p = flows.at(*k);
  return grid.lines()[*k].from == at ? p : -p;
}

namespace {

std::string byte_location(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < text.size() && i + 1 < byte; ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

const json& require(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) throw ParseError(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(path + "/" + key, "missing field");
  return *it;
}

double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ParseError(path, "expected a number");
  return v.get<double>();
}

BusId as_bus_id(const json& v, const std::string& path) {
  if (!v.is_number_integer()) throw ParseError(path, "expected an integer bus id");
  return v.get<BusId>();
}

}  // namespace

Grid load_grid(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document.begin(), document.end());
  } catch (const json::parse_error& e) {
    throw ParseError(byte_location(document, e.byte), "malformed document");
  }
  if (!doc.is_object()) throw ParseError("/", "expected an object");

  const json& jbuses = require(doc, "buses", "");
  if (!jbuses.is_array()) throw ParseError("/buses", "expected an array");
  std::vector<Bus> buses;
  for (std::size_t i = 0; i < jbuses.size(); ++i) {
    const std::string path = "/buses/" + std::to_string(i);
    Bus b;
    b.id = as_bus_id(require(jbuses[i], "id", path), path + "/id");
    b.injection = as_number(require(jbuses[i], "injection", path), path + "/injection");
    if (auto it = jbuses[i].find("zib"); it != jbuses[i].end()) {
      if (!it->is_boolean()) throw ParseError(path + "/zib", "expected a boolean");
      b.zib = it->get<bool>();
    }
    buses.push_back(b);
  }

  const json& jlines = require(doc, "lines", "");
  if (!jlines.is_array()) throw ParseError("/lines", "expected an array");
  std::vector<Line> lines;
  for (std::size_t k = 0; k < jlines.size(); ++k) {
    const std::string path = "/lines/" + std::to_string(k);
    Line l;
    l.from = as_bus_id(require(jlines[k], "from", path), path + "/from");
    l.to = as_bus_id(require(jlines[k], "to", path), path + "/to");
    l.reactance = as_number(require(jlines[k], "x", path), path + "/x");
    lines.push_back(l);
  }

  const BusId slack = as_bus_id(require(doc, "slack", ""), "/slack");

  std::vector<double> weights;
  if (auto it = doc.find("pmu_weights"); it != doc.end()) {
    if (!it->is_array()) throw ParseError("/pmu_weights", "expected an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      weights.push_back(as_number((*it)[i], "/pmu_weights/" + std::to_string(i)));
    }
  }

  std::string name;
  if (auto it = doc.find("name"); it != doc.end() && it->is_string()) {
    name = it->get<std::string>();
  }
  return Grid(std::move(buses), std::move(lines), slack, std::move(weights),
              std::move(name));
}

Grid load_grid_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, "cannot open file");
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return load_grid(buffer.str());
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.location(), e.message());
  }
}

BaseState dc_power_flow(const Grid& grid) {
  const std::size_t n = grid.bus_count();
  BaseState state;
  state.theta.assign(n, 0.0);
  state.flows.assign(grid.line_count(), 0.0);
  if (n > 1) {
    const auto slack = static_cast<std::size_t>(grid.slack() - 1);
    auto reduced = [slack](std::size_t i) { return i < slack ? i : i - 1; };

    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n - 1, n - 1);
    Eigen::VectorXd p(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
      if (i != slack) p(reduced(i)) = grid.buses()[i].injection;
    }
    for (const auto& line : grid.lines()) {
      const double y = 1.0 / line.reactance;
      const auto i = static_cast<std::size_t>(line.from - 1);
      const auto j = static_cast<std::size_t>(line.to - 1);
      if (i != slack) b(reduced(i), reduced(i)) += y;
      if (j != slack) b(reduced(j), reduced(j)) += y;
      if (i != slack && j != slack) {
        b(reduced(i), reduced(j)) -= y;
        b(reduced(j), reduced(i)) -= y;
      }
    }
    Eigen::LDLT<Eigen::MatrixXd> ldlt(b);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
        ldlt.vectorD().minCoeff() <= 1e-12 * ldlt.vectorD().maxCoeff()) {
      throw ValidationError("DC power flow: susceptance matrix is singular");
    }
    const Eigen::VectorXd theta = ldlt.solve(p);
    for (std::size_t i = 0; i < n; ++i) {
      if (i != slack) state.theta[i] = theta(reduced(i));
    }
  }
  for (std::size_t k = 0; k < grid.line_count(); ++k) {
    const auto& line = grid.lines()[k];
    state.flows[k] = (state.angle(line.from) - state.angle(line.to)) / line.reactance;
  }
  return state;
}

}  // namespace pmugame
