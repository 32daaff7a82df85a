#pragma once

#include <cstdint>
#include <utility>

#include "model.hpp"

namespace mlb {

struct GeneratedInstance {
  BeliefNetwork network;
  Evidence evidence;
};

// Random DAG where each variable picks at most three earlier parents, with
// cardinalities drawn from [min(2, d), d]. CPT rows are exponential draws with
// roughly zero_fraction of the entries forced to 0 (never a whole row), then
// normalized. Evidence is read off one forward sample, so P(e) > 0.
GeneratedInstance generate_random_network(int n, int d, double zero_fraction, int evidence_count,
                                          std::uint64_t seed);

// Binary two-layer network: uniform roots, deterministic leaves computing a
// random boolean function of `parents_per_leaf` distinct roots. Every leaf is
// observed at the value of one forward sample.
GeneratedInstance generate_two_layer_network(int roots, int leaves, int parents_per_leaf,
                                             std::uint64_t seed);

}  // namespace mlb
