// Shared scenario builders for the unit and acceptance tests.

#pragma once

#include <vector>

#include "casim/scenario_io.hpp"
#include "casim/verify.hpp"

namespace casim::testing {

/// Two-turn coin interaction. The first turn asks for a flip with no history;
/// the second asks again after the transcript "flip a coin Heads". The table
/// answers the first turn with `first` and the second with `second`.
struct TwoTurnCase {
  std::vector<Turn> turns;
  TokenSimulator simulator;
};

inline TwoTurnCase two_turn_case(std::string_view first, std::string_view second) {
  const TokenSequence prefix{"flip", "a", "coin", "Heads"};
  ConditionalTable table = coin_table(first);
  for (const auto& [prompt, row] : coin_table(second)) {
    TokenSequence full = prefix;
    full.insert(full.end(), prompt.begin(), prompt.end());
    table.emplace(full, row);
  }
  TwoTurnCase c{{Turn{{}, coin_observer()}, Turn{prefix, coin_observer()}},
                TokenSimulator(coin_vocabulary(), table, Sampler::top_k(2), 1, 16)};
  return c;
}

}  // namespace casim::testing
