#include "tilebn/inference.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>

#include "tilebn/error.hpp"

namespace tilebn {

namespace {

size_t value_count(const std::vector<int>& cards) {
  size_t n = 1;
  for (int c : cards) n *= static_cast<size_t>(c);
  return n;
}

// CPD of `child` as a factor with scope [parents..., child]; this matches the
// CPD's row-major layout, so values copy over flat.
Factor factor_from_cpd(const BayesianNetwork& net, int child) {
  Factor f;
  for (int p : net.parents(child)) {
    f.scope.push_back(p);
    f.cards.push_back(net.cardinality(p));
  }
  f.scope.push_back(child);
  f.cards.push_back(net.cardinality(child));
  f.values.reserve(value_count(f.cards));
  for (const auto& row : net.cpd(child)) {
    f.values.insert(f.values.end(), row.begin(), row.end());
  }
  return f;
}

// Drops observed variables from the factor by slicing at their states.
Factor reduce(const Factor& f, const std::map<int, int>& observed) {
  bool touched = false;
  for (int v : f.scope) {
    if (observed.count(v)) {
      touched = true;
      break;
    }
  }
  if (!touched) return f;

  Factor out;
  for (size_t i = 0; i < f.scope.size(); ++i) {
    if (!observed.count(f.scope[i])) {
      out.scope.push_back(f.scope[i]);
      out.cards.push_back(f.cards[i]);
    }
  }
  out.values.assign(value_count(out.cards), 0.0);

  std::vector<int> state(f.scope.size(), 0);
  const size_t total = value_count(f.cards);
  for (size_t idx = 0; idx < total; ++idx) {
    bool match = true;
    size_t out_idx = 0;
    for (size_t i = 0; i < f.scope.size(); ++i) {
      auto it = observed.find(f.scope[i]);
      if (it != observed.end()) {
        if (state[i] != it->second) {
          match = false;
          break;
        }
      } else {
        out_idx = out_idx * static_cast<size_t>(f.cards[i]) +
                  static_cast<size_t>(state[i]);
      }
    }
    if (match) out.values[out_idx] = f.values[idx];
    for (int i = static_cast<int>(f.scope.size()) - 1; i >= 0; --i) {
      if (++state[i] < f.cards[i]) break;
      state[i] = 0;
    }
  }
  return out;
}

}  // namespace

Factor factor_product(const Factor& a, const Factor& b) {
  Factor out;
  out.scope = a.scope;
  out.cards = a.cards;
  for (size_t i = 0; i < b.scope.size(); ++i) {
    if (std::find(out.scope.begin(), out.scope.end(), b.scope[i]) == out.scope.end()) {
      out.scope.push_back(b.scope[i]);
      out.cards.push_back(b.cards[i]);
    }
  }

  // Stride of each out-scope variable inside a and b (0 when absent).
  auto strides_in = [](const Factor& f, const std::vector<int>& scope) {
    std::vector<size_t> strides(scope.size(), 0);
    for (size_t s = 0; s < scope.size(); ++s) {
      auto it = std::find(f.scope.begin(), f.scope.end(), scope[s]);
      if (it == f.scope.end()) continue;
      const size_t pos = static_cast<size_t>(it - f.scope.begin());
      size_t stride = 1;
      for (size_t q = pos + 1; q < f.scope.size(); ++q) {
        stride *= static_cast<size_t>(f.cards[q]);
      }
      strides[s] = stride;
    }
    return strides;
  };
  const auto sa = strides_in(a, out.scope);
  const auto sb = strides_in(b, out.scope);

  const size_t total = value_count(out.cards);
  out.values.resize(total);
  std::vector<int> state(out.scope.size(), 0);
  for (size_t idx = 0; idx < total; ++idx) {
    size_t ia = 0, ib = 0;
    for (size_t s = 0; s < state.size(); ++s) {
      ia += sa[s] * static_cast<size_t>(state[s]);
      ib += sb[s] * static_cast<size_t>(state[s]);
    }
    out.values[idx] = a.values[ia] * b.values[ib];
    for (int i = static_cast<int>(state.size()) - 1; i >= 0; --i) {
      if (++state[i] < out.cards[i]) break;
      state[i] = 0;
    }
  }
  return out;
}

Factor factor_sum_out(const Factor& factor, int variable) {
  const auto it = std::find(factor.scope.begin(), factor.scope.end(), variable);
  if (it == factor.scope.end()) return factor;
  const size_t pos = static_cast<size_t>(it - factor.scope.begin());

  Factor out;
  for (size_t i = 0; i < factor.scope.size(); ++i) {
    if (i == pos) continue;
    out.scope.push_back(factor.scope[i]);
    out.cards.push_back(factor.cards[i]);
  }
  out.values.assign(value_count(out.cards), 0.0);

  size_t inner = 1;  // stride of the summed variable
  for (size_t q = pos + 1; q < factor.scope.size(); ++q) {
    inner *= static_cast<size_t>(factor.cards[q]);
  }
  const size_t var_card = static_cast<size_t>(factor.cards[pos]);
  const size_t outer = factor.values.size() / (inner * var_card);
  size_t out_idx = 0;
  for (size_t o = 0; o < outer; ++o) {
    const size_t base = o * inner * var_card;
    for (size_t i = 0; i < inner; ++i, ++out_idx) {
      double sum = 0.0;
      for (size_t v = 0; v < var_card; ++v) {
        sum += factor.values[base + v * inner + i];
      }
      out.values[out_idx] = sum;
    }
  }
  return out;
}

const std::vector<double>& MarginalTable::at(const std::string& id) const {
  for (size_t i = 0; i < targets.size(); ++i) {
    if (targets[i] == id) return distributions[i];
  }
  fail(ErrorCode::InvalidEvidence, "no marginal for '" + id + "'");
}

namespace {

struct Query {
  std::vector<int> target_indices;
  std::map<int, int> observed;
};

Query validate_query(const BayesianNetwork& net, const Evidence& evidence,
                     const std::vector<std::string>& targets) {
  if (targets.empty()) {
    fail(ErrorCode::InvalidEvidence, "target list is empty");
  }
  validate_evidence(net, evidence);
  Query q;
  for (const auto& [id, state] : evidence.assignments) {
    q.observed[net.index_of(id)] = state;
  }
  for (const auto& id : targets) {
    const int index = net.index_of(id);
    if (index < 0) {
      fail(ErrorCode::InvalidEvidence, "unknown target variable '" + id + "'");
    }
    if (q.observed.count(index)) {
      fail(ErrorCode::TargetObserved, "target '" + id + "' is observed");
    }
    q.target_indices.push_back(index);
  }
  return q;
}

// Min-fill elimination order over the interaction graph of the reduced
// factors. Ties break on ascending variable id so the order is unique.
std::vector<int> min_fill_order(const BayesianNetwork& net,
                                const std::vector<Factor>& factors,
                                const std::set<int>& to_eliminate) {
  std::map<int, std::set<int>> adjacency;
  for (const auto& f : factors) {
    for (int u : f.scope) {
      adjacency[u];
      for (int v : f.scope) {
        if (u != v) adjacency[u].insert(v);
      }
    }
  }

  std::set<int> remaining = to_eliminate;
  std::vector<int> order;
  order.reserve(remaining.size());
  while (!remaining.empty()) {
    int best = -1;
    long best_fill = -1;
    for (int v : remaining) {
      const auto& neighbors = adjacency[v];
      long fill = 0;
      for (auto it = neighbors.begin(); it != neighbors.end(); ++it) {
        auto jt = it;
        for (++jt; jt != neighbors.end(); ++jt) {
          if (!adjacency[*it].count(*jt)) ++fill;
        }
      }
      if (best < 0 || fill < best_fill ||
          (fill == best_fill &&
           net.variable(v).id < net.variable(best).id)) {
        best = v;
        best_fill = fill;
      }
    }
    order.push_back(best);
    // Connect neighbors, then remove the eliminated variable.
    const std::set<int> neighbors = adjacency[best];
    for (int u : neighbors) {
      for (int v : neighbors) {
        if (u != v) adjacency[u].insert(v);
      }
      adjacency[u].erase(best);
    }
    adjacency.erase(best);
    remaining.erase(best);
  }
  return order;
}

double normalize_or_fail(Factor& f) {
  double sum = 0.0;
  for (double v : f.values) sum += v;
  if (sum <= 0.0) {
    fail(ErrorCode::ZeroProbabilityEvidence,
         "evidence has probability 0 under the model");
  }
  for (double& v : f.values) v /= sum;
  return sum;
}

MarginalTable marginals_from_joint(const BayesianNetwork& net, Factor joint,
                                   const std::vector<std::string>& targets,
                                   const std::vector<int>& target_indices) {
  normalize_or_fail(joint);
  MarginalTable table;
  table.targets = targets;
  for (size_t t = 0; t < targets.size(); ++t) {
    Factor single = joint;
    for (int v : joint.scope) {
      if (v != target_indices[t]) single = factor_sum_out(single, v);
    }
    double sum = 0.0;
    for (double p : single.values) sum += p;
    for (double& p : single.values) p /= sum;
    table.distributions.push_back(std::move(single.values));
  }
  return table;
}

}  // namespace

MarginalTable query_marginal(const BayesianNetwork& network,
                             const Evidence& evidence,
                             const std::vector<std::string>& targets) {
  const Query q = validate_query(network, evidence, targets);

  std::vector<Factor> factors;
  factors.reserve(network.size());
  for (int v = 0; v < network.size(); ++v) {
    Factor f = reduce(factor_from_cpd(network, v), q.observed);
    if (f.scope.empty()) {
      // Fully observed family: a scalar that only scales the result, but a
      // zero here means the evidence is impossible.
      if (f.values[0] <= 0.0) {
        fail(ErrorCode::ZeroProbabilityEvidence,
             "evidence has probability 0 under the model");
      }
      continue;
    }
    factors.push_back(std::move(f));
  }

  std::set<int> to_eliminate;
  for (int v = 0; v < network.size(); ++v) {
    if (!q.observed.count(v) &&
        std::find(q.target_indices.begin(), q.target_indices.end(), v) ==
            q.target_indices.end()) {
      to_eliminate.insert(v);
    }
  }

  for (int v : min_fill_order(network, factors, to_eliminate)) {
    Factor combined;
    bool first = true;
    std::vector<Factor> rest;
    for (auto& f : factors) {
      if (std::find(f.scope.begin(), f.scope.end(), v) != f.scope.end()) {
        combined = first ? std::move(f) : factor_product(combined, f);
        first = false;
      } else {
        rest.push_back(std::move(f));
      }
    }
    if (first) continue;  // variable vanished through earlier reductions
    Factor summed = factor_sum_out(combined, v);
    if (!summed.scope.empty()) {
      normalize_or_fail(summed);
      rest.push_back(std::move(summed));
    } else if (summed.values[0] <= 0.0) {
      fail(ErrorCode::ZeroProbabilityEvidence,
           "evidence has probability 0 under the model");
    }
    factors = std::move(rest);
  }

  Factor joint;
  joint.values = {1.0};
  for (const auto& f : factors) joint = factor_product(joint, f);
  // Targets untouched by any factor (every variable owns a CPD factor, so
  // this only happens if reduction dropped them — impossible for unobserved
  // targets, but keep the joint complete regardless).
  for (int t : q.target_indices) {
    if (std::find(joint.scope.begin(), joint.scope.end(), t) == joint.scope.end()) {
      Factor uniform;
      uniform.scope = {t};
      uniform.cards = {network.cardinality(t)};
      uniform.values.assign(network.cardinality(t), 1.0);
      joint = factor_product(joint, uniform);
    }
  }
  return marginals_from_joint(network, std::move(joint), targets, q.target_indices);
}

MarginalTable enumerate_joint(const BayesianNetwork& network,
                              const Evidence& evidence,
                              const std::vector<std::string>& targets) {
  const Query q = validate_query(network, evidence, targets);

  double log2_states = 0.0;
  for (int v = 0; v < network.size(); ++v) {
    log2_states += std::log2(static_cast<double>(network.cardinality(v)));
  }
  if (log2_states > 24.0) {
    fail(ErrorCode::StateSpaceTooLarge,
         "joint state space exceeds 2^24 configurations");
  }

  // Iterate free variables only; observed ones stay clamped.
  std::vector<int> free_vars;
  size_t total = 1;
  for (int v = 0; v < network.size(); ++v) {
    if (!q.observed.count(v)) {
      free_vars.push_back(v);
      total *= static_cast<size_t>(network.cardinality(v));
    }
  }

  std::vector<int> state(network.size(), 0);
  for (const auto& [v, s] : q.observed) state[v] = s;

  MarginalTable table;
  table.targets = targets;
  for (int t : q.target_indices) {
    table.distributions.emplace_back(network.cardinality(t), 0.0);
  }

  double mass = 0.0;
  for (size_t idx = 0; idx < total; ++idx) {
    double p = 1.0;
    for (int v = 0; v < network.size(); ++v) {
      p *= network.cpd(v)[network.cpd_row(v, state)][state[v]];
    }
    mass += p;
    for (size_t t = 0; t < q.target_indices.size(); ++t) {
      table.distributions[t][state[q.target_indices[t]]] += p;
    }
    for (int i = static_cast<int>(free_vars.size()) - 1; i >= 0; --i) {
      const int v = free_vars[i];
      if (++state[v] < network.cardinality(v)) break;
      state[v] = 0;
    }
  }

  if (mass <= 0.0) {
    fail(ErrorCode::ZeroProbabilityEvidence,
         "evidence has probability 0 under the model");
  }
  for (auto& dist : table.distributions) {
    for (double& p : dist) p /= mass;
  }
  return table;
}

int map_state(const BayesianNetwork& network, const Evidence& evidence,
              const std::string& target) {
  const MarginalTable table = query_marginal(network, evidence, {target});
  const auto& dist = table.distributions[0];
  int best = 0;
  for (int i = 1; i < static_cast<int>(dist.size()); ++i) {
    if (dist[i] > dist[best]) best = i;
  }
  return best;
}

}  // namespace tilebn
