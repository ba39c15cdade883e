#pragma once

#include <cstdint>

#include "tilebn/network.hpp"
#include "tilebn/refinement.hpp"
#include "tilebn/rng.hpp"

namespace tilebn::testing {

// Random network for oracle-equivalence testing: up to `max_vars` variables
// with 2..4 states, random DAG with at most 3 parents per node, strictly
// positive normalized CPD rows. The joint state space is capped at
// `max_joint_states` so full enumeration stays cheap.
BayesianNetwork random_network(Xoshiro256pp& rng, int max_vars = 12,
                               size_t max_joint_states = 1u << 16);

// Random evidence over a subset of variables; `exclude` ids stay unobserved.
Evidence random_evidence(Xoshiro256pp& rng, const BayesianNetwork& network,
                         double observe_rate = 0.3,
                         const std::vector<std::string>& exclude = {});

// Random pelvic-convention network (R, T plus 1..max_features binary
// features, no age) with strictly positive CPDs, for refinement property
// tests.
BayesianNetwork random_pelvic_network(Xoshiro256pp& rng, int max_features = 4);

// Random detections over the network's feature classes.
ScoredDetections random_detections(Xoshiro256pp& rng,
                                   const BayesianNetwork& network);

}  // namespace tilebn::testing
