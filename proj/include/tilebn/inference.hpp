#pragma once

#include <string>
#include <vector>

#include "tilebn/network.hpp"

namespace tilebn {

// Posterior marginals for a list of target variables, aligned with the
// query's target order. Each distribution sums to 1 within 1e-9.
struct MarginalTable {
  std::vector<std::string> targets;
  std::vector<std::vector<double>> distributions;

  const std::vector<double>& at(const std::string& id) const;
};

// Nonnegative table over a set of variables; the internal currency of
// variable elimination. `scope` holds variable indices into the network,
// values are laid out in mixed radix with scope[0] most significant.
struct Factor {
  std::vector<int> scope;
  std::vector<int> cards;
  std::vector<double> values;
};

Factor factor_product(const Factor& a, const Factor& b);
Factor factor_sum_out(const Factor& factor, int variable);

// Exact posterior marginals p(target | evidence) by variable elimination.
// Elimination order is the min-fill heuristic with ties broken by ascending
// variable id, so identical queries return identical results. Intermediate
// factors are rescaled to sum 1 to keep long chains away from underflow.
MarginalTable query_marginal(const BayesianNetwork& network,
                             const Evidence& evidence,
                             const std::vector<std::string>& targets);

// Same contract as query_marginal, computed by summing the explicit joint
// distribution. Serves as the independent oracle for the elimination path;
// refuses joint state spaces above 2^24.
MarginalTable enumerate_joint(const BayesianNetwork& network,
                              const Evidence& evidence,
                              const std::vector<std::string>& targets);

// Index of the posterior mode of `target`; ties resolve to the lowest state
// index.
int map_state(const BayesianNetwork& network, const Evidence& evidence,
              const std::string& target);

}  // namespace tilebn
