#pragma once

#include <string>
#include <vector>

#include "tilebn/network.hpp"

namespace tilebn {

// Complete discrete dataset: one state-index row per patient, columns in
// `schema` order. `patient_ids` runs parallel to `rows` (empty when the
// source carried no ids).
struct Dataset {
  std::vector<std::string> schema;
  std::vector<std::vector<int>> rows;
  std::vector<std::string> patient_ids;
};

struct LearningConfig {
  double pseudocount = 1.0;  // symmetric Dirichlet cell count (alpha)
};

// Bayesian parameter estimation with uniform pseudocounts: cell k of parent
// configuration j gets (N_jk + alpha) / (N_j + alpha * r). With alpha > 0
// every entry is strictly positive; unobserved configurations come out
// uniform. Returns a fully validated network over `structure`.
BayesianNetwork fit_cpds(const NetworkStructure& structure, const Dataset& data,
                         const LearningConfig& config = {});

// Cohort file: delimited text, one row per patient, columns patient_id, age
// (integer years), R, T, and one 0/1 column per feature class. Values for
// non-age columns may be state indices or state labels; the age column is
// binned to the elderly flag at `age_threshold`.
Dataset ingest_cohort(const std::string& path, const NetworkStructure& structure,
                      int age_threshold = 65);
Dataset cohort_from_string(const std::string& text,
                           const NetworkStructure& structure,
                           int age_threshold = 65,
                           const std::string& origin = "<string>");

// Serializes a dataset back to the cohort format. The binary elderly flag is
// written as a representative age in years (42 adult, 74 elderly) so any
// threshold up to the default 65 re-bins it exactly.
std::string cohort_to_string(const NetworkStructure& structure, const Dataset& data);
void save_cohort(const NetworkStructure& structure, const Dataset& data,
                 const std::string& path);

inline constexpr int kAdultYears = 42;
inline constexpr int kElderlyYears = 74;

}  // namespace tilebn
