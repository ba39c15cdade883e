#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "tilebn/learning.hpp"
#include "tilebn/network.hpp"
#include "tilebn/refinement.hpp"
#include "tilebn/rng.hpp"

namespace tilebn {

// Ground-truth state of one synthetic patient.
struct PatientTruth {
  std::string patient_id;
  int elderly = 0;
  int r_unstable = 0;
  int t_unstable = 0;
  std::map<std::string, int> features;  // class -> 0/1 presence
};

struct BetaShape {
  double alpha = 1.0;
  double beta = 1.0;
};

// Detector behavior for one feature class: emission rates plus confidence
// distributions for true and false detections.
struct ClassProfile {
  double tp_rate = 0.75;
  double fp_rate = 0.05;
  BetaShape tp_confidence{8.0, 2.0};
  BetaShape fp_confidence{2.0, 5.0};
};

struct DetectorProfile {
  std::map<std::string, ClassProfile> classes;

  void validate() const;
};

// Ancestral sampling in topological order. Patient i draws from
// Xoshiro256pp(seed + i), one uniform per variable, so cohorts are bitwise
// reproducible and per-patient sampling is independently parallelizable.
std::vector<PatientTruth> sample_cohort(const BayesianNetwork& network, int n,
                                        uint64_t seed);

// Simulates one patient's detections: a present feature is emitted with
// probability tp_rate and confidence ~ Beta(tp_confidence); an absent one
// with probability fp_rate and confidence ~ Beta(fp_confidence). Features
// are processed in ascending class-name order; each consumes one uniform for
// the emission decision plus one more when a confidence is drawn.
ScoredDetections simulate_detections(const PatientTruth& truth,
                                     const DetectorProfile& profile,
                                     uint64_t seed);

// Documented default detector: per-class tp_rate within [0.6, 0.9], fp_rate
// within [0.02, 0.1], confidences Beta(8,2) true / Beta(2,5) false. The
// class "anteriorly divergent SI" gets the weakest profile (lowest tp_rate
// and the only lowered tp_confidence, Beta(6,3)).
DetectorProfile default_profile(const std::vector<std::string>& feature_classes);

// Truths as a Dataset over the network's variables, ready for fit_cpds or
// cohort serialization.
Dataset truths_to_dataset(const BayesianNetwork& network,
                          const std::vector<PatientTruth>& truths);

}  // namespace tilebn
