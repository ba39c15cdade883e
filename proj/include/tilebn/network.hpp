#pragma once

#include <map>
#include <string>
#include <vector>

namespace tilebn {

// A discrete variable with an ordered state space.
struct Variable {
  std::string id;
  std::string name;
  std::vector<std::string> states;
};

// DAG over variables. `parents` maps a variable id to its ordered parent ids;
// variables without an entry are roots.
struct NetworkStructure {
  std::vector<Variable> variables;
  std::map<std::string, std::vector<std::string>> parents;
};

// Conditional probability table of `child` given `parent_order`. Rows are
// indexed by the joint parent configuration in mixed radix with the first
// parent most significant; row k is the distribution over child states.
struct Cpd {
  std::string child;
  std::vector<std::string> parent_order;
  std::vector<std::vector<double>> table;
};

// Partial assignment of variables to observed state indices.
struct Evidence {
  std::map<std::string, int> assignments;
};

// Validated, immutable discrete Bayesian network. Construction checks every
// structural and probabilistic invariant; instances are safe to share across
// threads.
class BayesianNetwork {
 public:
  int size() const { return static_cast<int>(variables_.size()); }
  const std::vector<Variable>& variables() const { return variables_; }
  const Variable& variable(int index) const { return variables_[index]; }

  // Index of a variable id, or -1 when absent.
  int index_of(const std::string& id) const;
  bool contains(const std::string& id) const { return index_of(id) >= 0; }

  int cardinality(int index) const {
    return static_cast<int>(variables_[index].states.size());
  }
  const std::vector<int>& parents(int index) const { return parents_[index]; }

  // Normalized CPD rows of the variable at `index`, row convention as in Cpd.
  const std::vector<std::vector<double>>& cpd(int index) const {
    return cpds_[index];
  }

  // CPD row selected by a full (or sufficient) state vector indexed by
  // variable position.
  int cpd_row(int index, const std::vector<int>& state_by_index) const;

  // Variable ids in dependency order, parents before children, ties broken by
  // ascending id.
  const std::vector<std::string>& topological_ids() const { return topo_ids_; }

 private:
  friend BayesianNetwork build_network(const NetworkStructure& structure,
                                       const std::vector<Cpd>& cpds);

  std::vector<Variable> variables_;
  std::map<std::string, int> index_;
  std::vector<std::vector<int>> parents_;
  std::vector<std::vector<std::vector<double>>> cpds_;
  std::vector<std::string> topo_ids_;
};

// Checks variable, DAG and CPD invariants, re-normalizes rows exactly, and
// returns the immutable network. CPD parent_order may permute the structure's
// parent list; tables are re-indexed to the structure order.
BayesianNetwork build_network(const NetworkStructure& structure,
                              const std::vector<Cpd>& cpds);

// Validates a structure without CPDs (used by parameter learning and file
// loading). Returns variable ids in topological order.
std::vector<std::string> validate_structure(const NetworkStructure& structure);

std::vector<std::string> topological_order(const BayesianNetwork& network);

// Throws InvalidEvidence unless every assignment names a known variable and
// an in-range state.
void validate_evidence(const BayesianNetwork& network, const Evidence& evidence);

// Default pelvic template: binary instability nodes R and T, optionally a
// binary Age node with edges Age->R and Age->T, and one binary present/absent
// node per feature class with parents [R, T].
NetworkStructure default_pelvic_structure(
    const std::vector<std::string>& feature_classes, bool include_age);

// Well-known node ids used by the pelvic template.
inline constexpr const char* kRotationalId = "R";
inline constexpr const char* kTranslationalId = "T";
inline constexpr const char* kAgeId = "Age";

}  // namespace tilebn
