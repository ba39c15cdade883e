#include "support/brute_refine.hpp"

#include <algorithm>

#include "tilebn/inference.hpp"

namespace tilebn::testing {

namespace {

// Present-state evidence for a set of feature classes; every class uses the
// state labeled "present".
Evidence present_evidence(const BayesianNetwork& net,
                          const std::set<std::string>& classes) {
  Evidence evidence;
  for (const auto& fx : classes) {
    const Variable& var = net.variable(net.index_of(fx));
    for (size_t s = 0; s < var.states.size(); ++s) {
      if (var.states[s] == "present") {
        evidence.assignments[fx] = static_cast<int>(s);
      }
    }
  }
  return evidence;
}

int label_index(const BayesianNetwork& net, const char* id, const char* label) {
  const Variable& var = net.variable(net.index_of(id));
  for (size_t s = 0; s < var.states.size(); ++s) {
    if (var.states[s] == label) return static_cast<int>(s);
  }
  return -1;
}

std::pair<double, double> instabilities_by_enumeration(
    const BayesianNetwork& net, const Evidence& evidence) {
  const MarginalTable table = enumerate_joint(net, evidence, {"R", "T"});
  return {table.distributions[0][label_index(net, "R", "unstable")],
          table.distributions[1][label_index(net, "T", "unstable")]};
}

TileGrade grade_of(double p_r, double p_t) {
  const bool r_unstable = p_r > 0.5;
  const bool t_unstable = p_t > 0.5;
  if (t_unstable) return TileGrade::C;
  return r_unstable ? TileGrade::B : TileGrade::A;
}

}  // namespace

BruteRefinement brute_refine(const BayesianNetwork& network,
                             const ScoredDetections& detections,
                             const ThresholdConfig& thresholds) {
  BruteRefinement out;
  for (const auto& [fx, score] : detections.scores) {
    if (score >= thresholds.z_high) {
      out.fx_high_initial.insert(fx);
    } else if (score >= thresholds.z_low) {
      out.fx_low_initial.insert(fx);
    }
  }

  std::set<std::string> fx_high = out.fx_high_initial;
  std::set<std::string> fx_low = out.fx_low_initial;

  auto before = instabilities_by_enumeration(network, present_evidence(network, fx_high));
  out.p_r_before = before.first;
  out.p_t_before = before.second;
  out.initial_grade = grade_of(before.first, before.second);

  const int r_stable = label_index(network, "R", "stable");
  const int r_unstable = label_index(network, "R", "unstable");
  const int t_stable = label_index(network, "T", "stable");
  const int t_unstable = label_index(network, "T", "unstable");
  const std::vector<std::pair<int, int>> grade_states = {
      {r_stable, t_stable}, {r_unstable, t_stable}, {r_unstable, t_unstable}};

  for (const auto& [r_state, t_state] : grade_states) {
    // Candidate list for this hypothesized grade, highest probability first.
    std::vector<std::pair<std::string, double>> candidates;
    for (const auto& var : network.variables()) {
      if (var.id == "R" || var.id == "T" || var.id == "Age") continue;
      if (fx_high.count(var.id)) continue;
      Evidence evidence = present_evidence(network, fx_high);
      evidence.assignments["R"] = r_state;
      evidence.assignments["T"] = t_state;
      const MarginalTable table = enumerate_joint(network, evidence, {var.id});
      int present = -1;
      for (size_t s = 0; s < var.states.size(); ++s) {
        if (var.states[s] == "present") present = static_cast<int>(s);
      }
      candidates.emplace_back(var.id, table.distributions[0][present]);
    }
    std::sort(candidates.begin(), candidates.end(),
              [](const auto& a, const auto& b) {
                if (a.second != b.second) return a.second > b.second;
                return a.first < b.first;
              });
    for (const auto& [fx, p] : candidates) {
      if (p > thresholds.z_promote && fx_low.count(fx)) {
        fx_high.insert(fx);
        fx_low.erase(fx);
        out.promoted.push_back(fx);
      }
    }
  }

  out.fx_high_final = fx_high;
  auto after = instabilities_by_enumeration(network, present_evidence(network, fx_high));
  out.p_r_after = after.first;
  out.p_t_after = after.second;
  out.final_grade = grade_of(after.first, after.second);
  return out;
}

}  // namespace tilebn::testing
