#pragma once

#include <string>

#include "tilebn/network.hpp"

namespace tilebn::testing {

inline std::string fixture_path(const std::string& name) {
  return std::string(TILEBN_FIXTURE_DIR) + "/" + name;
}

inline std::string tmp_path(const std::string& name) {
  return std::string(TILEBN_TEST_TMPDIR) + "/" + name;
}

// Two-variable chain A -> B with p(A=1)=0.3, p(B=1|A=0)=0.2, p(B=1|A=1)=0.9.
inline BayesianNetwork chain_ab() {
  NetworkStructure structure;
  structure.variables = {{"A", "A", {"0", "1"}}, {"B", "B", {"0", "1"}}};
  structure.parents["B"] = {"A"};
  return build_network(structure, {
                                      {"A", {}, {{0.7, 0.3}}},
                                      {"B", {"A"}, {{0.8, 0.2}, {0.1, 0.9}}},
                                  });
}

}  // namespace tilebn::testing
