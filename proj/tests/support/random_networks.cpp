#include "support/random_networks.hpp"

#include <cstdio>

namespace tilebn::testing {

BayesianNetwork random_network(Xoshiro256pp& rng, int max_vars,
                               size_t max_joint_states) {
  const int n = 1 + static_cast<int>(rng.bounded(static_cast<uint64_t>(max_vars)));
  NetworkStructure structure;
  size_t joint = 1;
  std::vector<int> cards;
  for (int i = 0; i < n; ++i) {
    int card = 2 + static_cast<int>(rng.bounded(3));
    if (joint * card > max_joint_states) card = 2;
    joint *= static_cast<size_t>(card);
    char id[8];
    std::snprintf(id, sizeof(id), "V%02d", i);
    Variable var;
    var.id = id;
    var.name = id;
    for (int s = 0; s < card; ++s) var.states.push_back("s" + std::to_string(s));
    structure.variables.push_back(var);
    cards.push_back(card);
  }
  // Edges only from lower to higher position: acyclic by construction.
  for (int child = 1; child < n; ++child) {
    std::vector<std::string> parents;
    for (int parent = 0; parent < child && parents.size() < 3; ++parent) {
      if (rng.uniform() < 0.35) {
        parents.push_back(structure.variables[parent].id);
      }
    }
    if (!parents.empty()) {
      structure.parents[structure.variables[child].id] = parents;
    }
  }

  std::vector<Cpd> cpds;
  for (int i = 0; i < n; ++i) {
    Cpd cpd;
    cpd.child = structure.variables[i].id;
    size_t rows = 1;
    if (structure.parents.count(cpd.child)) {
      cpd.parent_order = structure.parents[cpd.child];
      for (const auto& p : cpd.parent_order) {
        for (int q = 0; q < n; ++q) {
          if (structure.variables[q].id == p) rows *= cards[q];
        }
      }
    }
    for (size_t r = 0; r < rows; ++r) {
      std::vector<double> row(cards[i]);
      double sum = 0.0;
      for (double& p : row) {
        p = 0.05 + rng.uniform();  // strictly positive entries
        sum += p;
      }
      for (double& p : row) p /= sum;
      cpd.table.push_back(std::move(row));
    }
    cpds.push_back(std::move(cpd));
  }
  return build_network(structure, cpds);
}

Evidence random_evidence(Xoshiro256pp& rng, const BayesianNetwork& network,
                         double observe_rate,
                         const std::vector<std::string>& exclude) {
  Evidence evidence;
  for (const auto& var : network.variables()) {
    bool excluded = false;
    for (const auto& id : exclude) {
      if (id == var.id) excluded = true;
    }
    if (excluded) continue;
    if (rng.uniform() < observe_rate) {
      evidence.assignments[var.id] =
          static_cast<int>(rng.bounded(var.states.size()));
    }
  }
  return evidence;
}

BayesianNetwork random_pelvic_network(Xoshiro256pp& rng, int max_features) {
  const int n_features =
      1 + static_cast<int>(rng.bounded(static_cast<uint64_t>(max_features)));
  std::vector<std::string> classes;
  for (int i = 0; i < n_features; ++i) classes.push_back("fx" + std::to_string(i));
  NetworkStructure structure = default_pelvic_structure(classes, false);

  auto random_row = [&rng]() {
    const double p = 0.02 + 0.96 * rng.uniform();
    return std::vector<double>{1.0 - p, p};
  };
  std::vector<Cpd> cpds;
  cpds.push_back({kRotationalId, {}, {random_row()}});
  cpds.push_back({kTranslationalId, {}, {random_row()}});
  for (const auto& fx : classes) {
    Cpd cpd;
    cpd.child = fx;
    cpd.parent_order = {kRotationalId, kTranslationalId};
    for (int r = 0; r < 4; ++r) cpd.table.push_back(random_row());
    cpds.push_back(std::move(cpd));
  }
  return build_network(structure, cpds);
}

ScoredDetections random_detections(Xoshiro256pp& rng,
                                   const BayesianNetwork& network) {
  ScoredDetections detections;
  detections.patient_id = "random";
  for (const auto& fx : feature_nodes(network)) {
    if (rng.uniform() < 0.7) {
      detections.scores[fx] = rng.uniform();
    }
  }
  return detections;
}

}  // namespace tilebn::testing
