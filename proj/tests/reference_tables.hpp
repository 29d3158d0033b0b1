#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "pmugame/equilibrium.hpp"
#include "pmugame/game.hpp"

namespace reference {

struct AttackWeight {
  pmugame::AttackAction action;
  double weight;
};

struct DefenseWeight {
  pmugame::BusId bus;
  double weight;
};

// Published NE distributions for the 14-bus game. The grouped row
// "Lines 6-11, 6-12, 6-13" is the single action on those three flows.
inline const std::vector<AttackWeight> kPlainAttacker{
    {{2, false, {1}}, 0.3113}, {{2, false, {3}}, 0.4923}, {{6, false, {11, 12, 13}}, 0.1965}};
inline const std::vector<DefenseWeight> kPlainDefender{{1, 0.3774}, {3, 0.6071}, {10, 0.0155}};
inline const std::vector<AttackWeight> kZibAttacker{{{2, false, {3}}, 0.7685},
                                                    {{6, false, {11, 12, 13}}, 0.2315}};
inline const std::vector<DefenseWeight> kZibDefender{{3, 0.7685}, {10, 0.2032}, {13, 0.0283}};

// Published detection rates.
inline constexpr double kPlainRate = 0.4075;
inline constexpr double kZibRate = 0.6250;
inline constexpr double kPlainNaive = 0.2590;
inline constexpr double kZibNaive = 0.2381;

// The published weights are rounded to 4 places and may not sum to exactly
// one, so they are renormalised.
inline pmugame::MixedStrategy attacker_strategy(const pmugame::PayoffMatrix& m,
                                                const std::vector<AttackWeight>& table) {
  std::vector<double> w(m.rows(), 0.0);
  for (const auto& row : table) {
    const auto it = std::find(m.attacks().begin(), m.attacks().end(), row.action);
    if (it == m.attacks().end()) throw std::runtime_error("attack " + row.action.label() + " not in game");
    w[static_cast<std::size_t>(it - m.attacks().begin())] = row.weight;
  }
  return pmugame::MixedStrategy::from_weights(w);
}

inline pmugame::MixedStrategy defender_strategy(const pmugame::PayoffMatrix& m,
                                                const std::vector<DefenseWeight>& table) {
  std::vector<double> w(m.cols(), 0.0);
  for (const auto& row : table) {
    const auto it = std::find(m.defenses().begin(), m.defenses().end(), row.bus);
    if (it == m.defenses().end()) throw std::runtime_error("bus " + std::to_string(row.bus) + " not in S_D");
    w[static_cast<std::size_t>(it - m.defenses().begin())] = row.weight;
  }
  return pmugame::MixedStrategy::from_weights(w);
}

}  // namespace reference
