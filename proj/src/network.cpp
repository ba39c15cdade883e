#include "tilebn/network.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>

#include "tilebn/error.hpp"

namespace tilebn {

namespace {

constexpr double kRowSumTolerance = 1e-6;

void validate_variable(const Variable& v) {
  if (v.id.empty()) {
    fail(ErrorCode::InvalidVariable, "variable with empty id");
  }
  if (v.states.size() < 2) {
    fail(ErrorCode::CardinalityMismatch,
         "variable '" + v.id + "' needs at least 2 states, has " +
             std::to_string(v.states.size()));
  }
  std::set<std::string> seen;
  for (const auto& s : v.states) {
    if (!seen.insert(s).second) {
      fail(ErrorCode::InvalidVariable,
           "variable '" + v.id + "' repeats state label '" + s + "'");
    }
  }
}

// Kahn's algorithm with a min-heap on variable id, so the order is unique.
std::vector<std::string> topological_sort(
    const std::vector<Variable>& variables,
    const std::map<std::string, std::vector<std::string>>& parents) {
  std::map<std::string, int> pending;
  std::map<std::string, std::vector<std::string>> children;
  for (const auto& v : variables) pending[v.id] = 0;
  for (const auto& [child, pars] : parents) {
    pending[child] = static_cast<int>(pars.size());
    for (const auto& p : pars) children[p].push_back(child);
  }

  std::priority_queue<std::string, std::vector<std::string>, std::greater<>> ready;
  for (const auto& [id, count] : pending) {
    if (count == 0) ready.push(id);
  }

  std::vector<std::string> order;
  order.reserve(variables.size());
  while (!ready.empty()) {
    const std::string id = ready.top();
    ready.pop();
    order.push_back(id);
    auto it = children.find(id);
    if (it == children.end()) continue;
    for (const auto& c : it->second) {
      if (--pending[c] == 0) ready.push(c);
    }
  }
  if (order.size() != variables.size()) {
    fail(ErrorCode::CycleDetected, "parent relation contains a directed cycle");
  }
  return order;
}

}  // namespace

std::vector<std::string> validate_structure(const NetworkStructure& structure) {
  if (structure.variables.empty()) {
    fail(ErrorCode::InvalidStructure, "structure has no variables");
  }
  std::set<std::string> ids;
  for (const auto& v : structure.variables) {
    validate_variable(v);
    if (!ids.insert(v.id).second) {
      fail(ErrorCode::InvalidStructure, "duplicate variable id '" + v.id + "'");
    }
  }
  for (const auto& [child, pars] : structure.parents) {
    if (!ids.count(child)) {
      fail(ErrorCode::InvalidStructure,
           "parent list for unknown variable '" + child + "'");
    }
    std::set<std::string> seen;
    for (const auto& p : pars) {
      if (!ids.count(p)) {
        fail(ErrorCode::InvalidStructure,
             "unknown parent '" + p + "' of '" + child + "'");
      }
      if (p == child) {
        fail(ErrorCode::InvalidStructure, "self-loop on '" + child + "'");
      }
      if (!seen.insert(p).second) {
        fail(ErrorCode::InvalidStructure,
             "duplicate parent '" + p + "' of '" + child + "'");
      }
    }
  }
  return topological_sort(structure.variables, structure.parents);
}

int BayesianNetwork::index_of(const std::string& id) const {
  auto it = index_.find(id);
  return it == index_.end() ? -1 : it->second;
}

int BayesianNetwork::cpd_row(int index, const std::vector<int>& state_by_index) const {
  int row = 0;
  for (int parent : parents_[index]) {
    row = row * cardinality(parent) + state_by_index[parent];
  }
  return row;
}

BayesianNetwork build_network(const NetworkStructure& structure,
                              const std::vector<Cpd>& cpds) {
  if (cpds.empty()) {
    fail(ErrorCode::MissingCpd, "no CPDs supplied");
  }
  BayesianNetwork net;
  net.topo_ids_ = validate_structure(structure);
  net.variables_ = structure.variables;
  for (int i = 0; i < net.size(); ++i) net.index_[net.variables_[i].id] = i;

  net.parents_.resize(net.size());
  for (const auto& [child, pars] : structure.parents) {
    auto& slot = net.parents_[net.index_[child]];
    for (const auto& p : pars) slot.push_back(net.index_[p]);
  }

  // Attach CPDs, re-indexing tables whose parent_order permutes the
  // structure's parent list.
  std::vector<const Cpd*> by_variable(net.size(), nullptr);
  for (const auto& cpd : cpds) {
    const int child = net.index_of(cpd.child);
    if (child < 0) {
      fail(ErrorCode::InvalidStructure,
           "CPD for unknown variable '" + cpd.child + "'");
    }
    if (by_variable[child] != nullptr) {
      fail(ErrorCode::InvalidStructure, "duplicate CPD for '" + cpd.child + "'");
    }
    by_variable[child] = &cpd;
  }
  for (int i = 0; i < net.size(); ++i) {
    if (by_variable[i] == nullptr) {
      fail(ErrorCode::MissingCpd, "no CPD for variable '" + net.variables_[i].id + "'");
    }
  }

  net.cpds_.resize(net.size());
  for (int child = 0; child < net.size(); ++child) {
    const Cpd& cpd = *by_variable[child];
    const auto& parent_ids = structure.parents.count(cpd.child)
                                 ? structure.parents.at(cpd.child)
                                 : std::vector<std::string>{};

    // Position of each structure parent inside the CPD's parent_order.
    std::vector<int> cpd_pos(parent_ids.size());
    if (cpd.parent_order.size() != parent_ids.size()) {
      fail(ErrorCode::InvalidStructure,
           "CPD for '" + cpd.child + "' lists " +
               std::to_string(cpd.parent_order.size()) + " parents, structure has " +
               std::to_string(parent_ids.size()));
    }
    for (size_t s = 0; s < parent_ids.size(); ++s) {
      auto it = std::find(cpd.parent_order.begin(), cpd.parent_order.end(),
                          parent_ids[s]);
      if (it == cpd.parent_order.end()) {
        fail(ErrorCode::InvalidStructure,
             "CPD for '" + cpd.child + "' does not cover parent '" +
                 parent_ids[s] + "'");
      }
      cpd_pos[s] = static_cast<int>(it - cpd.parent_order.begin());
    }

    const int child_card = net.cardinality(child);
    size_t expected_rows = 1;
    std::vector<int> parent_cards(parent_ids.size());
    for (size_t s = 0; s < parent_ids.size(); ++s) {
      parent_cards[s] = net.cardinality(net.index_[parent_ids[s]]);
      expected_rows *= static_cast<size_t>(parent_cards[s]);
    }
    if (cpd.table.size() != expected_rows) {
      fail(ErrorCode::CardinalityMismatch,
           "CPD for '" + cpd.child + "' has " + std::to_string(cpd.table.size()) +
               " rows, expected " + std::to_string(expected_rows));
    }

    // Strides of each structure parent within the CPD's own row indexing.
    std::vector<int> cpd_strides(parent_ids.size(), 1);
    for (size_t s = 0; s < parent_ids.size(); ++s) {
      int stride = 1;
      for (size_t q = 0; q < parent_ids.size(); ++q) {
        if (cpd_pos[q] > cpd_pos[s]) stride *= parent_cards[q];
      }
      cpd_strides[s] = stride;
    }

    auto& table = net.cpds_[child];
    table.assign(expected_rows, {});
    std::vector<int> config(parent_ids.size(), 0);
    for (size_t row = 0; row < expected_rows; ++row) {
      int source_row = 0;
      for (size_t s = 0; s < parent_ids.size(); ++s) {
        source_row += config[s] * cpd_strides[s];
      }
      const auto& source = cpd.table[source_row];
      if (static_cast<int>(source.size()) != child_card) {
        fail(ErrorCode::CardinalityMismatch,
             "CPD row for '" + cpd.child + "' has width " +
                 std::to_string(source.size()) + ", expected " +
                 std::to_string(child_card));
      }
      double sum = 0.0;
      for (double p : source) {
        if (!(p >= -kRowSumTolerance) || !(p <= 1.0 + kRowSumTolerance) ||
            std::isnan(p)) {
          fail(ErrorCode::RowNotNormalized,
               "CPD entry outside [0,1] for '" + cpd.child + "' row " +
                   std::to_string(source_row));
        }
        sum += p;
      }
      if (std::fabs(sum - 1.0) > kRowSumTolerance) {
        fail(ErrorCode::RowNotNormalized,
             "CPD row " + std::to_string(source_row) + " of '" + cpd.child +
                 "' sums to " + std::to_string(sum));
      }
      std::vector<double> normalized(source.size());
      for (size_t k = 0; k < source.size(); ++k) {
        normalized[k] = std::max(0.0, source[k]) / sum;
      }
      table[row] = std::move(normalized);

      // Advance mixed-radix parent configuration, first parent most
      // significant.
      for (int s = static_cast<int>(parent_ids.size()) - 1; s >= 0; --s) {
        if (++config[s] < parent_cards[s]) break;
        config[s] = 0;
      }
    }
  }
  return net;
}

std::vector<std::string> topological_order(const BayesianNetwork& network) {
  return network.topological_ids();
}

void validate_evidence(const BayesianNetwork& network, const Evidence& evidence) {
  for (const auto& [id, state] : evidence.assignments) {
    const int index = network.index_of(id);
    if (index < 0) {
      fail(ErrorCode::InvalidEvidence, "evidence on unknown variable '" + id + "'");
    }
    if (state < 0 || state >= network.cardinality(index)) {
      fail(ErrorCode::InvalidEvidence,
           "evidence state " + std::to_string(state) + " out of range for '" +
               id + "'");
    }
  }
}

NetworkStructure default_pelvic_structure(
    const std::vector<std::string>& feature_classes, bool include_age) {
  if (feature_classes.empty()) {
    fail(ErrorCode::InvalidStructure, "feature class list is empty");
  }
  std::set<std::string> seen = {kRotationalId, kTranslationalId, kAgeId};
  for (const auto& fx : feature_classes) {
    if (!seen.insert(fx).second) {
      fail(ErrorCode::DuplicateFeatureName,
           "feature class '" + fx + "' duplicated or reserved");
    }
  }

  NetworkStructure structure;
  if (include_age) {
    structure.variables.push_back(
        {kAgeId, "age 65 or older", {"adult", "elderly"}});
  }
  structure.variables.push_back(
      {kRotationalId, "rotational instability", {"stable", "unstable"}});
  structure.variables.push_back(
      {kTranslationalId, "translational instability", {"stable", "unstable"}});
  if (include_age) {
    structure.parents[kRotationalId] = {kAgeId};
    structure.parents[kTranslationalId] = {kAgeId};
  }
  for (const auto& fx : feature_classes) {
    structure.variables.push_back({fx, fx, {"absent", "present"}});
    structure.parents[fx] = {kRotationalId, kTranslationalId};
  }
  return structure;
}

}  // namespace tilebn
