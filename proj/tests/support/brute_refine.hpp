#pragma once

#include <set>
#include <string>
#include <vector>

#include "tilebn/network.hpp"
#include "tilebn/refinement.hpp"

namespace tilebn::testing {

// Independent re-execution of the refinement loop used as a test oracle.
// Everything is recomputed from first principles on top of enumerate_joint:
// thresholding, evidence construction, grade mapping and the grade loop are
// written out locally rather than calling the production refinement code.
// Only the present-only evidence mode and immediate promotions are covered,
// matching the defaults the production path is checked against.
struct BruteRefinement {
  std::set<std::string> fx_high_initial;
  std::set<std::string> fx_low_initial;
  TileGrade initial_grade;
  double p_r_before = 0.0, p_t_before = 0.0;
  std::vector<std::string> promoted;  // in promotion order
  std::set<std::string> fx_high_final;
  TileGrade final_grade;
  double p_r_after = 0.0, p_t_after = 0.0;
};

BruteRefinement brute_refine(const BayesianNetwork& network,
                             const ScoredDetections& detections,
                             const ThresholdConfig& thresholds);

}  // namespace tilebn::testing
