#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tilebn/metrics.hpp"
#include "tilebn/network.hpp"
#include "tilebn/refinement.hpp"
#include "tilebn/simulator.hpp"

namespace tilebn {

// Partial per-class detector override from a configuration file.
struct ClassProfileOverride {
  std::optional<double> tp_rate;
  std::optional<double> fp_rate;
  std::optional<BetaShape> tp_confidence;
  std::optional<BetaShape> fp_confidence;
};

// Everything a synthetic evaluation run depends on. All randomness derives
// from `seed`.
struct ExperimentConfig {
  std::string fixture_path;
  int cohort_size = 2000;
  uint64_t seed = 20250401;
  int folds = 5;
  ThresholdConfig thresholds;
  EvidenceMode mode = EvidenceMode::PresentOnly;
  PromotionPolicy policy = PromotionPolicy::Immediate;
  double alpha = 1.0;
  int age_threshold = 65;
  std::map<std::string, ClassProfileOverride> profile_overrides;

  void validate() const;
};

// Reads an experiment configuration: TOML-style key = value text with
// optional [profile."<class>"] override sections, or a JSON object with the
// same keys when the file starts with '{'. Relative fixture paths resolve
// against the config file's directory.
ExperimentConfig load_experiment_config(const std::string& path);
ExperimentConfig experiment_config_from_string(const std::string& text,
                                               const std::string& origin = "<string>");

// Per-instability scores for one condition across folds.
struct ConditionScores {
  std::vector<double> auc_r, auc_t;
  std::vector<double> kappa_r, kappa_t;
  std::vector<double> tile_kappa;  // 3-way grade agreement, informational

  double mean_auc_r() const;
  double mean_auc_t() const;
  double mean_kappa_r() const;
  double mean_kappa_t() const;
  double mean_tile_kappa() const;
};

// The four evaluation conditions: true feature labels, every detection at or
// above z_low, only detections at or above z_high, and the refinement loop.
struct ExperimentReport {
  ExperimentConfig config;
  ConditionScores gt;
  ConditionScores fx_low;
  ConditionScores fx_high;
  ConditionScores refined;
};

// Cohort, detections, fold splits and per-fold fitted networks shared by
// run_experiment and sweep_z_low.
struct PreparedExperiment {
  BayesianNetwork generator;
  std::vector<PatientTruth> truths;
  std::vector<ScoredDetections> detections;
  std::vector<FoldSplit> folds;
  std::vector<BayesianNetwork> fitted;
};

PreparedExperiment prepare_experiment(const ExperimentConfig& config);

// Samples a cohort, simulates detections, and per fold fits CPDs on the
// train rows and scores the four conditions on the test rows: AUC over
// p(unstable), kappa over predictions thresholded at 0.5, for R and T.
ExperimentReport run_experiment(const ExperimentConfig& config);
ExperimentReport run_experiment(const ExperimentConfig& config,
                                const PreparedExperiment& prepared);

// One sweep point: the unrefined baseline conditions directly on detections
// at or above z, the refinement with z_low = z, and the z-independent
// ground-truth condition. Cross-fold means.
struct SweepRow {
  double z = 0.0;
  double auc_r = 0.0, auc_t = 0.0;
  double auc_r_refined = 0.0, auc_t_refined = 0.0;
  double auc_r_gt = 0.0, auc_t_gt = 0.0;
};

// Evaluates every z in `z_values` (strictly increasing, all below z_high)
// against one shared cohort/detections/fit; only the thresholding changes.
std::vector<SweepRow> sweep_z_low(const ExperimentConfig& config,
                                  const std::vector<double>& z_values);

std::string report_to_string(const ExperimentReport& report);
std::string report_summary_text(const ExperimentReport& report);
std::string sweep_to_csv(const std::vector<SweepRow>& rows);

// Applies config overrides on top of default_profile.
DetectorProfile effective_profile(const ExperimentConfig& config,
                                  const std::vector<std::string>& feature_classes);

}  // namespace tilebn
