#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "pmugame/grid.hpp"
#include "pmugame/observability.hpp"

namespace pmugame {

enum class Norm { L1, L2, Linf };

std::string_view to_string(Norm norm);
/// Accepts "l1", "l2", "linf" (case-insensitive). Throws std::invalid_argument.
Norm parse_norm(std::string_view text);

/// How a manipulated flow reading is biased.
enum class FlowBias {
  Absolute,      // p_uk + epsilon_flow
  Proportional,  // p_uk * (1 + epsilon_flow)
};

std::string_view to_string(FlowBias bias);
/// Accepts "absolute" or "proportional". Throws std::invalid_argument.
FlowBias parse_flow_bias(std::string_view text);

/// Magnitudes injected by the attacker. A manipulated angle reads
/// theta_u + epsilon_theta; a manipulated flow is biased per `flow_bias`.
struct AttackModel {
  double epsilon_theta = 0.05;  // radians
  double epsilon_flow = 0.1;    // per-unit (Absolute) or fraction (Proportional)
  Norm norm = Norm::L2;
  FlowBias flow_bias = FlowBias::Proportional;

  double flow_offset(double measured) const {
    return flow_bias == FlowBias::Absolute ? epsilon_flow : epsilon_flow * measured;
  }

  void validate() const;
  AttackModel scaled(double factor) const;
};

double vector_norm(const std::vector<double>& v, Norm norm);

/// An attack on the PMU at `target`: a nonempty subset of its angle
/// measurement and the flows it reports on incident lines.
struct AttackAction {
  BusId target = 0;
  bool angle = false;
  BusSet flows;  // far-end bus k of each manipulated p_{target,k}, ascending

  std::size_t measurement_count() const { return flows.size() + (angle ? 1 : 0); }
  /// Machine form, e.g. "2:{p2-1,p2-3,theta2}".
  std::string label() const;
  /// Table form, e.g. "Line 1-2", "Lines 6-11, 6-12, 6-13 + angle 6".
  std::string description() const;

  friend bool operator==(const AttackAction&, const AttackAction&) = default;
};

/// S_A: every nonempty measurement subset of every PMU, ascending by target
/// bus; within a bus, by subset size then lexicographically over the
/// measurement order (flows by far-end bus, then the angle).
std::vector<AttackAction> enumerate_attacks(const Grid& grid, const Placement& placement);

/// Closed form sum over PMU buses u of (2^(deg u + 1) - 1).
std::size_t attack_count(const Grid& grid, const Placement& placement);

/// B_alpha: non-PMU buses observed by exactly one PMU that become doubly
/// observed when a PMU is added at `alpha`.
BusSet redundancy_gain(const Grid& grid, const Placement& placement, BusId alpha);

/// S_D via candidate classification: non-PMU buses whose gain sets are equal
/// or nested share a class (transitively); each class contributes its bus with
/// the largest gain set, smallest id on ties. Buses with an empty gain set are
/// dominated and only survive when every gain set is empty.
BusSet defense_candidates(const Grid& grid, const Placement& placement);

/// C_a: far-end bus of every manipulated flow, plus the target and all its
/// neighbours when the angle is manipulated.
BusSet affected_buses(const Grid& grid, const AttackAction& attack);

/// E = Theta - Theta_bad, where every bus's estimate comes from its
/// lowest-indexed observing PMU in `placement` (defense PMU included).
std::vector<double> attack_effect(const Grid& grid, const BaseState& base,
                                  const Placement& placement, const AttackAction& attack,
                                  const AttackModel& model);

/// Attacker payoff F_A over attacks (rows) x defense buses (columns), plus the
/// detection indicator O(a,d) > 1. The defender payoff is the negation.
class PayoffMatrix {
 public:
  using Indicator = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

  PayoffMatrix(std::vector<AttackAction> attacks, BusSet defenses, Eigen::MatrixXd values,
               Indicator detected);

  std::size_t rows() const { return attacks_.size(); }
  std::size_t cols() const { return defenses_.size(); }
  const std::vector<AttackAction>& attacks() const { return attacks_; }
  const BusSet& defenses() const { return defenses_; }

  double value(std::size_t a, std::size_t d) const { return values_(index(a), index(d)); }
  double defender_value(std::size_t a, std::size_t d) const { return -value(a, d); }
  bool detected(std::size_t a, std::size_t d) const { return detected_(index(a), index(d)) != 0; }

  const Eigen::MatrixXd& attacker_payoffs() const { return values_; }
  Eigen::MatrixXd defender_payoffs() const { return -values_; }
  const Indicator& detection() const { return detected_; }
  /// Largest undetected payoff (0 when every cell is detected).
  double max_value() const;

  std::string to_csv() const;

 private:
  static Eigen::Index index(std::size_t i) { return static_cast<Eigen::Index>(i); }

  std::vector<AttackAction> attacks_;
  BusSet defenses_;
  Eigen::MatrixXd values_;
  Indicator detected_;
};

PayoffMatrix build_payoff_matrix(const Grid& grid, const BaseState& base,
                                 const Placement& placement,
                                 const std::vector<AttackAction>& attacks,
                                 const BusSet& defenses, const AttackModel& model);

}  // namespace pmugame
