#pragma once

#include <string>

#include "tilebn/network.hpp"

namespace tilebn {

// Network specification file ("tilebn-network/1"): variables with ordered
// states, edges as [parent, child] pairs, and row-major CPD tables with an
// explicit parent_order. Serialization is canonical — fixed key order,
// variables and CPDs in declaration order, edges grouped by child, 17
// significant digits — so save(load(x)) is byte-identical to save(x).
std::string network_to_string(const BayesianNetwork& network);
BayesianNetwork network_from_string(const std::string& text,
                                    const std::string& origin = "<string>");

void save_network(const BayesianNetwork& network, const std::string& path);
BayesianNetwork load_network(const std::string& path);

// Loads only variables and edges from a network specification file; CPDs, if
// present, are ignored. Used where tables are about to be re-fit.
NetworkStructure load_structure(const std::string& path);

}  // namespace tilebn
