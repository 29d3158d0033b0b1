#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pmugame {

/// Buses are numbered 1..n; index = id - 1.
using BusId = int;
using BusSet = std::vector<BusId>;  // sorted, unique

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& location, const std::string& message)
      : std::runtime_error(location + ": " + message),
        location_(location),
        message_(message) {}
  const std::string& location() const noexcept { return location_; }
  const std::string& message() const noexcept { return message_; }

 private:
  std::string location_;
  std::string message_;
};

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Bus {
  BusId id = 0;
  double injection = 0.0;  // net real power, per-unit
  bool zib = false;
};

/// Undirected line stored with from < to. Flow sign follows from -> to.
struct Line {
  BusId from = 0;
  BusId to = 0;
  double reactance = 0.0;  // per-unit

  BusId other(BusId end) const { return end == from ? to : from; }
};

/// Immutable power network. The constructor enforces every structural
/// invariant (ids 1..n, positive reactances, distinct/unique lines, ZIBs
/// carry zero injection, connectivity) and throws ValidationError otherwise.
class Grid {
 public:
  Grid(std::vector<Bus> buses, std::vector<Line> lines, BusId slack,
       std::vector<double> pmu_weights = {}, std::string name = {});

  std::size_t bus_count() const { return buses_.size(); }
  std::size_t line_count() const { return lines_.size(); }
  const std::string& name() const { return name_; }

  const std::vector<Bus>& buses() const { return buses_; }
  const std::vector<Line>& lines() const { return lines_; }
  const Bus& bus(BusId id) const;
  BusId slack() const { return slack_; }
  bool contains(BusId id) const {
    return id >= 1 && static_cast<std::size_t>(id) <= buses_.size();
  }
  bool is_zib(BusId id) const { return bus(id).zib; }
  BusSet zib_buses() const;

  /// A_i: neighbours of bus i, ascending. Throws std::out_of_range for an
  /// unknown bus.
  const BusSet& adjacency(BusId id) const;
  std::size_t degree(BusId id) const { return adjacency(id).size(); }

  /// Indices into lines() of lines incident to `id`, ordered by far-end bus.
  const std::vector<std::size_t>& incident_lines(BusId id) const;
  std::optional<std::size_t> line_between(BusId a, BusId b) const;

  /// Per-bus placement cost w_m (defaults to 1).
  const std::vector<double>& pmu_weights() const { return weights_; }
  double pmu_weight(BusId id) const { return weights_.at(index(id)); }

 private:
  std::size_t index(BusId id) const;

  std::string name_;
  std::vector<Bus> buses_;
  std::vector<Line> lines_;
  BusId slack_;
  std::vector<double> weights_;
  std::vector<BusSet> adjacency_;
  std::vector<std::vector<std::size_t>> incident_;
};

/// Per-bus phase angles (radians) and per-line flows (per-unit) of the
/// base-case DC power flow.
struct BaseState {
  std::vector<double> theta;  // indexed by bus id - 1
  std::vector<double> flows;  // indexed like Grid::lines(), from -> to

  double angle(BusId id) const { return theta.at(static_cast<std::size_t>(id - 1)); }
  /// Flow measured at `at` on the line towards `towards` (p_{at,towards}).
  double flow(const Grid& grid, BusId at, BusId towards) const;
};

/// Parses a grid document (JSON). Throws ParseError for syntax or schema
/// problems (location is "line:col" or a JSON pointer) and ValidationError
/// for invariant violations.
Grid load_grid(std::string_view document);
Grid load_grid_file(const std::string& path);

/// Solves B' theta = P on the slack-reduced susceptance matrix; the slack
/// absorbs any injection mismatch. Throws ValidationError if the reduced
/// system is singular.
BaseState dc_power_flow(const Grid& grid);

/// Angle at the far end of a line given the near-end angle and the flow
/// leaving the near end: theta_j = theta_i - p_ij * x_ij.
constexpr double propagate_angle(double theta_i, double p_ij, double x_ij) {
  return theta_i - p_ij * x_ij;
}

}  // namespace pmugame
