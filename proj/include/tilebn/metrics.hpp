#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace tilebn {

// ROC curve from (0,0) to (1,1), one point per distinct score threshold in
// descending order. Both coordinates are nondecreasing along the list.
struct RocCurve {
  std::vector<std::pair<double, double>> points;  // (fpr, tpr)
};

// Probability that a uniformly random positive outscores a uniformly random
// negative, ties counted 1/2. Requires at least one label of each class.
double roc_auc(const std::vector<double>& scores, const std::vector<int>& labels);

RocCurve roc_curve(const std::vector<double>& scores,
                   const std::vector<int>& labels);

// Trapezoidal area under a curve; equals roc_auc for curves built by
// roc_curve.
double trapezoid_area(const RocCurve& curve);

// Chance-corrected agreement k = (p_o - p_e) / (1 - p_e). When both
// sequences are constant and identical (p_o = p_e = 1) the result is 1.
double cohens_kappa(const std::vector<int>& pred, const std::vector<int>& truth);

struct FoldSplit {
  std::vector<int> train;
  std::vector<int> test;
};

// Seeded Fisher-Yates shuffle of [0, n), then k contiguous test blocks of
// size floor(n/k) or ceil(n/k); the first n mod k folds take the larger
// size. Test sets partition the index range; train is the sorted complement.
std::vector<FoldSplit> kfold_split(int n, int k, uint64_t seed);

}  // namespace tilebn
