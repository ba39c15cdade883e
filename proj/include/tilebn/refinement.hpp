#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "tilebn/network.hpp"

namespace tilebn {

// First-order pelvic instability grade: A stable, B rotationally unstable,
// C globally unstable.
enum class TileGrade { A, B, C };

const char* grade_name(TileGrade grade);
TileGrade grade_from_name(const std::string& name);

// How undetected feature nodes enter the evidence: left unobserved
// (PresentOnly, the default) or clamped to absent (ClosedWorld).
enum class EvidenceMode { PresentOnly, ClosedWorld };

// Whether promotions take effect inside the grade loop (later grades see the
// updated high-confidence set) or are collected and applied once at the end.
enum class PromotionPolicy { Immediate, BatchAtEnd };

// Per-patient detector output: confidence per emitted feature class. A class
// with no entry produced no detection at all.
struct ScoredDetections {
  std::string patient_id;
  std::map<std::string, double> scores;
};

// Thresholded partition of the detections.
struct DetectionSet {
  std::set<std::string> fx_high;
  std::set<std::string> fx_low;
};

// z_high: high-confidence cut (score >= z_high lands in fx_high);
// z_low: floor of the low-confidence band [z_low, z_high);
// z_promote: a candidate is promoted only when its marginal exceeds this.
struct ThresholdConfig {
  double z_high = 0.95;
  double z_low = 0.5;
  double z_promote = 0.95;

  void validate() const;
};

struct Promotion {
  std::string feature;
  double probability;
  TileGrade grade;  // the hypothesized grade whose query triggered it
};

struct InstabilityScores {
  double p_r_unstable = 0.0;
  double p_t_unstable = 0.0;
};

// Full trace of one refinement run.
struct RefinementResult {
  DetectionSet initial_sets;
  TileGrade initial_grade = TileGrade::A;
  InstabilityScores before;
  std::vector<Promotion> promoted;
  std::set<std::string> final_fx_high;
  TileGrade final_grade = TileGrade::A;
  InstabilityScores after;
};

// Feature nodes of a pelvic-convention network: every variable except R, T
// and Age, in declaration order.
std::vector<std::string> feature_nodes(const BayesianNetwork& network);

// fx_high = {score >= z_high}; fx_low = {z_low <= score < z_high}; scores
// below z_low are dropped.
DetectionSet detections_to_sets(const ScoredDetections& detections,
                                const ThresholdConfig& thresholds);

// PresentOnly: each fx_high feature observed present, the rest unobserved.
// ClosedWorld: additionally clamps every other feature node to absent.
Evidence evidence_from_detections(const BayesianNetwork& network,
                                  const std::set<std::string>& fx_high,
                                  EvidenceMode mode);

// Grade from the two instability verdicts. (stable, unstable) — a
// combination outside the canonical taxonomy — maps to C, the globally
// unstable grade.
TileGrade tile_from_instabilities(bool r_unstable, bool t_unstable);

// A -> both stable; B -> R unstable, T stable; C -> both unstable.
Evidence tile_to_evidence(const BayesianNetwork& network, TileGrade grade);

// Posterior p(unstable) for R and T under the given evidence.
InstabilityScores predict_instabilities(const BayesianNetwork& network,
                                        const Evidence& evidence);

// Marginal presence probability of every feature outside fx_high, under
// evidence {fx_high present} plus the hypothesized grade, sorted by
// descending probability (ties by feature name). PresentOnly leaves the
// other candidates unobserved; ClosedWorld clamps all non-queried,
// non-fx_high features to absent (leave-one-out).
std::vector<std::pair<std::string, double>> candidate_fractures(
    const BayesianNetwork& network, const std::set<std::string>& fx_high,
    TileGrade grade, EvidenceMode mode = EvidenceMode::PresentOnly);

// The refinement loop: partition detections, infer the initial grade from
// fx_high, then for each hypothesized grade in [A, B, C] promote every
// fx_low member whose candidate probability exceeds z_promote, and re-infer
// the final grade on the grown high-confidence set.
RefinementResult refine(const BayesianNetwork& network,
                        const ScoredDetections& detections,
                        const ThresholdConfig& thresholds,
                        EvidenceMode mode = EvidenceMode::PresentOnly,
                        PromotionPolicy policy = PromotionPolicy::Immediate);

// Detections file ("tilebn-detections/1") and the per-patient refinement
// report, both serialized canonically.
std::string detections_to_string(const std::vector<ScoredDetections>& patients);
std::vector<ScoredDetections> detections_from_string(
    const std::string& text, const std::string& origin = "<string>");
void save_detections(const std::vector<ScoredDetections>& patients,
                     const std::string& path);
std::vector<ScoredDetections> load_detections(const std::string& path);

std::string refinement_report_to_string(
    const std::vector<std::string>& patient_ids,
    const std::vector<RefinementResult>& results,
    const ThresholdConfig& thresholds, EvidenceMode mode,
    PromotionPolicy policy);

}  // namespace tilebn
