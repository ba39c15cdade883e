#include "tilebn/metrics.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "tilebn/error.hpp"
#include "tilebn/rng.hpp"

namespace tilebn {

namespace {

struct ClassCounts {
  long positives = 0;
  long negatives = 0;
};

ClassCounts check_binary_input(const std::vector<double>& scores,
                               const std::vector<int>& labels) {
  if (scores.size() != labels.size()) {
    fail(ErrorCode::LengthMismatch, "scores and labels have different lengths");
  }
  ClassCounts counts;
  for (int label : labels) {
    if (label == 1) {
      ++counts.positives;
    } else if (label == 0) {
      ++counts.negatives;
    } else {
      fail(ErrorCode::DegenerateLabels, "labels must be 0 or 1");
    }
  }
  if (counts.positives == 0 || counts.negatives == 0) {
    fail(ErrorCode::DegenerateLabels, "need at least one label of each class");
  }
  return counts;
}

// Scores grouped by distinct value, descending; each group carries its
// positive and negative counts.
std::vector<std::pair<long, long>> tie_groups(const std::vector<double>& scores,
                                              const std::vector<int>& labels) {
  std::vector<int> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return scores[a] > scores[b];
  });
  std::vector<std::pair<long, long>> groups;
  size_t i = 0;
  while (i < order.size()) {
    size_t j = i;
    long pos = 0, neg = 0;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      if (labels[order[j]] == 1) ++pos; else ++neg;
      ++j;
    }
    groups.emplace_back(pos, neg);
    i = j;
  }
  return groups;
}

}  // namespace

double roc_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
  const ClassCounts counts = check_binary_input(scores, labels);
  const auto groups = tie_groups(scores, labels);
  // Pair counting over tie groups: a positive beats every negative ranked
  // strictly below its group and splits its own group's negatives.
  double numerator = 0.0;
  long negatives_below = counts.negatives;
  for (const auto& [pos, neg] : groups) {
    negatives_below -= neg;
    numerator += static_cast<double>(pos) * static_cast<double>(negatives_below);
    numerator += 0.5 * static_cast<double>(pos) * static_cast<double>(neg);
  }
  return numerator /
         (static_cast<double>(counts.positives) * static_cast<double>(counts.negatives));
}

RocCurve roc_curve(const std::vector<double>& scores,
                   const std::vector<int>& labels) {
  const ClassCounts counts = check_binary_input(scores, labels);
  const auto groups = tie_groups(scores, labels);
  RocCurve curve;
  curve.points.emplace_back(0.0, 0.0);
  long tp = 0, fp = 0;
  for (const auto& [pos, neg] : groups) {
    tp += pos;
    fp += neg;
    curve.points.emplace_back(
        static_cast<double>(fp) / static_cast<double>(counts.negatives),
        static_cast<double>(tp) / static_cast<double>(counts.positives));
  }
  return curve;
}

double trapezoid_area(const RocCurve& curve) {
  double area = 0.0;
  for (size_t i = 1; i < curve.points.size(); ++i) {
    const auto& [x0, y0] = curve.points[i - 1];
    const auto& [x1, y1] = curve.points[i];
    area += (x1 - x0) * 0.5 * (y0 + y1);
  }
  return area;
}

double cohens_kappa(const std::vector<int>& pred, const std::vector<int>& truth) {
  if (pred.size() != truth.size()) {
    fail(ErrorCode::LengthMismatch, "prediction and truth lengths differ");
  }
  if (pred.empty()) {
    fail(ErrorCode::LengthMismatch, "kappa needs at least one sample");
  }
  const double n = static_cast<double>(pred.size());
  std::map<int, double> pred_freq, truth_freq;
  double agreement = 0.0;
  for (size_t i = 0; i < pred.size(); ++i) {
    pred_freq[pred[i]] += 1.0;
    truth_freq[truth[i]] += 1.0;
    if (pred[i] == truth[i]) agreement += 1.0;
  }
  const double p_o = agreement / n;
  double p_e = 0.0;
  for (const auto& [label, count] : pred_freq) {
    auto it = truth_freq.find(label);
    if (it != truth_freq.end()) {
      p_e += (count / n) * (it->second / n);
    }
  }
  if (p_e >= 1.0) {
    // Both sequences constant over the same label: perfect agreement.
    return p_o >= 1.0 ? 1.0 : 0.0;
  }
  return (p_o - p_e) / (1.0 - p_e);
}

std::vector<FoldSplit> kfold_split(int n, int k, uint64_t seed) {
  if (k < 2) {
    fail(ErrorCode::ConfigInvalid, "k-fold requires k >= 2");
  }
  if (n < k) {
    fail(ErrorCode::TooFewSamples,
         std::to_string(n) + " samples cannot fill " + std::to_string(k) + " folds");
  }
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  Xoshiro256pp rng(seed);
  for (int i = n - 1; i > 0; --i) {
    const int j = static_cast<int>(rng.bounded(static_cast<uint64_t>(i) + 1));
    std::swap(order[i], order[j]);
  }

  std::vector<FoldSplit> folds(k);
  const int base = n / k;
  const int extra = n % k;
  int start = 0;
  for (int f = 0; f < k; ++f) {
    const int size = base + (f < extra ? 1 : 0);
    folds[f].test.assign(order.begin() + start, order.begin() + start + size);
    std::sort(folds[f].test.begin(), folds[f].test.end());
    start += size;
  }
  for (int f = 0; f < k; ++f) {
    std::vector<bool> in_test(n, false);
    for (int i : folds[f].test) in_test[i] = true;
    for (int i = 0; i < n; ++i) {
      if (!in_test[i]) folds[f].train.push_back(i);
    }
  }
  return folds;
}

}  // namespace tilebn
