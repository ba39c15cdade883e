#include "tilebn/refinement.hpp"

#include <algorithm>

#include <json.hpp>

#include "tilebn/error.hpp"
#include "tilebn/inference.hpp"
#include "tilebn/json_writer.hpp"

namespace tilebn {

namespace {

// State index of a labeled state, falling back to a positional convention
// (index 1 = positive) for binary nodes with unconventional labels.
int state_index(const Variable& var, const std::string& label, int fallback) {
  for (size_t s = 0; s < var.states.size(); ++s) {
    if (var.states[s] == label) return static_cast<int>(s);
  }
  return fallback;
}

int present_index(const Variable& var) { return state_index(var, "present", 1); }
int absent_index(const Variable& var) { return state_index(var, "absent", 0); }
int unstable_index(const Variable& var) { return state_index(var, "unstable", 1); }
int stable_index(const Variable& var) { return state_index(var, "stable", 0); }

const Variable& require_node(const BayesianNetwork& net, const char* id) {
  const int index = net.index_of(id);
  if (index < 0) {
    fail(ErrorCode::MissingRequiredNode,
         std::string("network has no '") + id + "' node");
  }
  return net.variable(index);
}

}  // namespace

const char* grade_name(TileGrade grade) {
  switch (grade) {
    case TileGrade::A: return "A";
    case TileGrade::B: return "B";
    case TileGrade::C: return "C";
  }
  return "?";
}

TileGrade grade_from_name(const std::string& name) {
  if (name == "A") return TileGrade::A;
  if (name == "B") return TileGrade::B;
  if (name == "C") return TileGrade::C;
  fail(ErrorCode::ConfigInvalid, "unknown Tile grade '" + name + "'");
}

void ThresholdConfig::validate() const {
  if (!(z_high > 0.0 && z_high <= 1.0)) {
    fail(ErrorCode::ConfigInvalid, "z_high must lie in (0, 1]");
  }
  if (!(z_low >= 0.0 && z_low < 1.0)) {
    fail(ErrorCode::ConfigInvalid, "z_low must lie in [0, 1)");
  }
  if (!(z_promote > 0.0 && z_promote <= 1.0)) {
    fail(ErrorCode::ConfigInvalid, "z_promote must lie in (0, 1]");
  }
  if (!(z_low < z_high)) {
    fail(ErrorCode::ConfigInvalid, "z_low must be strictly below z_high");
  }
}

std::vector<std::string> feature_nodes(const BayesianNetwork& network) {
  std::vector<std::string> features;
  for (const auto& v : network.variables()) {
    if (v.id != kRotationalId && v.id != kTranslationalId && v.id != kAgeId) {
      features.push_back(v.id);
    }
  }
  return features;
}

DetectionSet detections_to_sets(const ScoredDetections& detections,
                                const ThresholdConfig& thresholds) {
  thresholds.validate();
  DetectionSet sets;
  for (const auto& [fx, score] : detections.scores) {
    if (score < 0.0 || score > 1.0) {
      fail(ErrorCode::ConfigInvalid,
           "confidence " + format_double(score) + " for '" + fx +
               "' outside [0, 1]");
    }
    if (score >= thresholds.z_high) {
      sets.fx_high.insert(fx);
    } else if (score >= thresholds.z_low) {
      sets.fx_low.insert(fx);
    }
  }
  return sets;
}

Evidence evidence_from_detections(const BayesianNetwork& network,
                                  const std::set<std::string>& fx_high,
                                  EvidenceMode mode) {
  Evidence evidence;
  for (const auto& fx : fx_high) {
    const int index = network.index_of(fx);
    if (index < 0 || fx == kRotationalId || fx == kTranslationalId ||
        fx == kAgeId) {
      fail(ErrorCode::UnknownFeature,
           "detected class '" + fx + "' is not a feature node");
    }
    evidence.assignments[fx] = present_index(network.variable(index));
  }
  if (mode == EvidenceMode::ClosedWorld) {
    for (const auto& fx : feature_nodes(network)) {
      if (!fx_high.count(fx)) {
        evidence.assignments[fx] =
            absent_index(network.variable(network.index_of(fx)));
      }
    }
  }
  return evidence;
}

TileGrade tile_from_instabilities(bool r_unstable, bool t_unstable) {
  if (t_unstable) return TileGrade::C;
  return r_unstable ? TileGrade::B : TileGrade::A;
}

Evidence tile_to_evidence(const BayesianNetwork& network, TileGrade grade) {
  const Variable& r = require_node(network, kRotationalId);
  const Variable& t = require_node(network, kTranslationalId);
  Evidence evidence;
  switch (grade) {
    case TileGrade::A:
      evidence.assignments[r.id] = stable_index(r);
      evidence.assignments[t.id] = stable_index(t);
      break;
    case TileGrade::B:
      evidence.assignments[r.id] = unstable_index(r);
      evidence.assignments[t.id] = stable_index(t);
      break;
    case TileGrade::C:
      evidence.assignments[r.id] = unstable_index(r);
      evidence.assignments[t.id] = unstable_index(t);
      break;
  }
  return evidence;
}

InstabilityScores predict_instabilities(const BayesianNetwork& network,
                                        const Evidence& evidence) {
  const Variable& r = require_node(network, kRotationalId);
  const Variable& t = require_node(network, kTranslationalId);
  if (evidence.assignments.count(r.id) || evidence.assignments.count(t.id)) {
    fail(ErrorCode::TargetObserved, "R or T already observed in evidence");
  }
  const MarginalTable table = query_marginal(network, evidence, {r.id, t.id});
  InstabilityScores scores;
  scores.p_r_unstable = table.distributions[0][unstable_index(r)];
  scores.p_t_unstable = table.distributions[1][unstable_index(t)];
  return scores;
}

std::vector<std::pair<std::string, double>> candidate_fractures(
    const BayesianNetwork& network, const std::set<std::string>& fx_high,
    TileGrade grade, EvidenceMode mode) {
  Evidence base = evidence_from_detections(network, fx_high,
                                           EvidenceMode::PresentOnly);
  const Evidence tile = tile_to_evidence(network, grade);
  base.assignments.insert(tile.assignments.begin(), tile.assignments.end());

  std::vector<std::string> queried;
  for (const auto& fx : feature_nodes(network)) {
    if (!fx_high.count(fx)) queried.push_back(fx);
  }
  std::vector<std::pair<std::string, double>> candidates;
  if (queried.empty()) return candidates;

  if (mode == EvidenceMode::PresentOnly) {
    const MarginalTable table = query_marginal(network, base, queried);
    for (size_t i = 0; i < queried.size(); ++i) {
      const Variable& var = network.variable(network.index_of(queried[i]));
      candidates.emplace_back(queried[i],
                              table.distributions[i][present_index(var)]);
    }
  } else {
    // Leave-one-out closed world: each candidate is queried with every other
    // undetected feature clamped to absent.
    for (const auto& fx : queried) {
      Evidence evidence = base;
      for (const auto& other : queried) {
        if (other != fx) {
          const Variable& var = network.variable(network.index_of(other));
          evidence.assignments[other] = absent_index(var);
        }
      }
      const Variable& var = network.variable(network.index_of(fx));
      const MarginalTable table = query_marginal(network, evidence, {fx});
      candidates.emplace_back(fx, table.distributions[0][present_index(var)]);
    }
  }

  std::sort(candidates.begin(), candidates.end(),
            [](const auto& a, const auto& b) {
              if (a.second != b.second) return a.second > b.second;
              return a.first < b.first;
            });
  return candidates;
}

RefinementResult refine(const BayesianNetwork& network,
                        const ScoredDetections& detections,
                        const ThresholdConfig& thresholds, EvidenceMode mode,
                        PromotionPolicy policy) {
  for (const auto& [fx, score] : detections.scores) {
    if (network.index_of(fx) < 0 || fx == kRotationalId ||
        fx == kTranslationalId || fx == kAgeId) {
      fail(ErrorCode::UnknownFeature,
           "detected class '" + fx + "' is not a feature node");
    }
    (void)score;
  }

  RefinementResult result;
  result.initial_sets = detections_to_sets(detections, thresholds);

  std::set<std::string> fx_high = result.initial_sets.fx_high;
  std::set<std::string> fx_low = result.initial_sets.fx_low;

  result.before = predict_instabilities(
      network, evidence_from_detections(network, fx_high, mode));
  result.initial_grade = tile_from_instabilities(
      result.before.p_r_unstable > 0.5, result.before.p_t_unstable > 0.5);

  const std::set<std::string> query_set =
      policy == PromotionPolicy::BatchAtEnd ? fx_high : std::set<std::string>{};
  std::vector<Promotion> pending;
  for (TileGrade grade : {TileGrade::A, TileGrade::B, TileGrade::C}) {
    const auto& base_set =
        policy == PromotionPolicy::Immediate ? fx_high : query_set;
    for (const auto& [fx, p] : candidate_fractures(network, base_set, grade, mode)) {
      if (p > thresholds.z_promote && fx_low.count(fx)) {
        if (policy == PromotionPolicy::Immediate) {
          fx_high.insert(fx);
          fx_low.erase(fx);
          result.promoted.push_back({fx, p, grade});
        } else {
          const bool already =
              std::any_of(pending.begin(), pending.end(),
                          [&](const Promotion& q) { return q.feature == fx; });
          if (!already) pending.push_back({fx, p, grade});
        }
      }
    }
  }
  if (policy == PromotionPolicy::BatchAtEnd) {
    for (const auto& promo : pending) {
      fx_high.insert(promo.feature);
      fx_low.erase(promo.feature);
      result.promoted.push_back(promo);
    }
  }

  result.final_fx_high = fx_high;
  if (result.promoted.empty()) {
    result.after = result.before;
    result.final_grade = result.initial_grade;
  } else {
    result.after = predict_instabilities(
        network, evidence_from_detections(network, fx_high, mode));
    result.final_grade = tile_from_instabilities(
        result.after.p_r_unstable > 0.5, result.after.p_t_unstable > 0.5);
  }
  return result;
}

std::string detections_to_string(const std::vector<ScoredDetections>& patients) {
  JsonWriter w;
  w.begin_object();
  w.key("format").value("tilebn-detections/1");
  w.key("patients").begin_array();
  for (const auto& patient : patients) {
    w.begin_object();
    w.key("patient_id").value(patient.patient_id);
    w.key("detections").begin_array();
    for (const auto& [fx, score] : patient.scores) {
      w.begin_object();
      w.key("class").value(fx);
      w.key("confidence").value(score);
      w.end_object();
    }
    w.end_array();
    w.end_object();
  }
  w.end_array();
  w.end_object();
  return w.str();
}

std::vector<ScoredDetections> detections_from_string(const std::string& text,
                                                     const std::string& origin) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::ParseError, origin + ": " + e.what());
  }
  if (!doc.is_object() || !doc.contains("patients")) {
    fail(ErrorCode::ParseError, origin + ": expected object with 'patients'");
  }
  std::vector<ScoredDetections> patients;
  for (const auto& p : doc["patients"]) {
    ScoredDetections detections;
    detections.patient_id = p.value("patient_id", "");
    if (p.contains("detections")) {
      for (const auto& d : p["detections"]) {
        if (!d.contains("class") || !d.contains("confidence")) {
          fail(ErrorCode::ParseError,
               origin + ": detection missing 'class' or 'confidence'");
        }
        const double score = d["confidence"].get<double>();
        if (score < 0.0 || score > 1.0) {
          fail(ErrorCode::ParseError,
               origin + ": confidence outside [0, 1] for patient '" +
                   detections.patient_id + "'");
        }
        detections.scores[d["class"].get<std::string>()] = score;
      }
    }
    patients.push_back(std::move(detections));
  }
  return patients;
}

void save_detections(const std::vector<ScoredDetections>& patients,
                     const std::string& path) {
  write_file_atomic(path, detections_to_string(patients));
}

std::vector<ScoredDetections> load_detections(const std::string& path) {
  return detections_from_string(read_file(path), path);
}

namespace {

void write_string_set(JsonWriter& w, const std::set<std::string>& values) {
  w.begin_array();
  for (const auto& v : values) w.value(v);
  w.end_array();
}

void write_scores(JsonWriter& w, const InstabilityScores& scores) {
  w.begin_object();
  w.key("p_r_unstable").value(scores.p_r_unstable);
  w.key("p_t_unstable").value(scores.p_t_unstable);
  w.end_object();
}

}  // namespace

std::string refinement_report_to_string(
    const std::vector<std::string>& patient_ids,
    const std::vector<RefinementResult>& results,
    const ThresholdConfig& thresholds, EvidenceMode mode,
    PromotionPolicy policy) {
  if (patient_ids.size() != results.size()) {
    fail(ErrorCode::LengthMismatch, "patient id and result counts differ");
  }
  JsonWriter w;
  w.begin_object();
  w.key("format").value("tilebn-refinement-report/1");
  w.key("thresholds").begin_object();
  w.key("z_high").value(thresholds.z_high);
  w.key("z_low").value(thresholds.z_low);
  w.key("z_promote").value(thresholds.z_promote);
  w.end_object();
  w.key("evidence_mode")
      .value(mode == EvidenceMode::PresentOnly ? "present_only" : "closed_world");
  w.key("promotion_policy")
      .value(policy == PromotionPolicy::Immediate ? "immediate" : "batch_at_end");
  w.key("patients").begin_array();
  for (size_t i = 0; i < results.size(); ++i) {
    const RefinementResult& r = results[i];
    w.begin_object();
    w.key("patient_id").value(patient_ids[i]);
    w.key("fx_high_initial");
    write_string_set(w, r.initial_sets.fx_high);
    w.key("fx_low_initial");
    write_string_set(w, r.initial_sets.fx_low);
    w.key("initial_grade").value(grade_name(r.initial_grade));
    w.key("instability_before");
    write_scores(w, r.before);
    w.key("promoted").begin_array();
    for (const auto& promo : r.promoted) {
      w.begin_object();
      w.key("class").value(promo.feature);
      w.key("probability").value(promo.probability);
      w.key("grade").value(grade_name(promo.grade));
      w.end_object();
    }
    w.end_array();
    w.key("fx_high_final");
    write_string_set(w, r.final_fx_high);
    w.key("final_grade").value(grade_name(r.final_grade));
    w.key("instability_after");
    write_scores(w, r.after);
    w.end_object();
  }
  w.end_array();
  w.end_object();
  return w.str();
}

}  // namespace tilebn
