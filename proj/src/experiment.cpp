#include "tilebn/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "tilebn/error.hpp"
#include "tilebn/inference.hpp"
#include "tilebn/json_writer.hpp"
#include "tilebn/network_io.hpp"

namespace tilebn {

namespace {

double mean_of(const std::vector<double>& values) {
  if (values.empty()) return 0.0;
  return std::accumulate(values.begin(), values.end(), 0.0) /
         static_cast<double>(values.size());
}

}  // namespace

double ConditionScores::mean_auc_r() const { return mean_of(auc_r); }
double ConditionScores::mean_auc_t() const { return mean_of(auc_t); }
double ConditionScores::mean_kappa_r() const { return mean_of(kappa_r); }
double ConditionScores::mean_kappa_t() const { return mean_of(kappa_t); }
double ConditionScores::mean_tile_kappa() const { return mean_of(tile_kappa); }

void ExperimentConfig::validate() const {
  if (fixture_path.empty()) {
    fail(ErrorCode::ConfigInvalid, "no fixture path configured");
  }
  if (cohort_size < folds) {
    fail(ErrorCode::ConfigInvalid, "cohort smaller than the fold count");
  }
  if (folds < 2) {
    fail(ErrorCode::ConfigInvalid, "need at least 2 folds");
  }
  if (alpha < 0.0) {
    fail(ErrorCode::ConfigInvalid, "alpha must be nonnegative");
  }
  thresholds.validate();
}

DetectorProfile effective_profile(const ExperimentConfig& config,
                                  const std::vector<std::string>& feature_classes) {
  DetectorProfile profile = default_profile(feature_classes);
  for (const auto& [fx, override_values] : config.profile_overrides) {
    auto it = profile.classes.find(fx);
    if (it == profile.classes.end()) {
      fail(ErrorCode::ConfigInvalid,
           "profile override for unknown class '" + fx + "'");
    }
    if (override_values.tp_rate) it->second.tp_rate = *override_values.tp_rate;
    if (override_values.fp_rate) it->second.fp_rate = *override_values.fp_rate;
    if (override_values.tp_confidence) {
      it->second.tp_confidence = *override_values.tp_confidence;
    }
    if (override_values.fp_confidence) {
      it->second.fp_confidence = *override_values.fp_confidence;
    }
  }
  profile.validate();
  return profile;
}

PreparedExperiment prepare_experiment(const ExperimentConfig& config) {
  config.validate();
  PreparedExperiment prepared;
  prepared.generator = load_network(config.fixture_path);

  prepared.truths = sample_cohort(prepared.generator, config.cohort_size,
                                  config.seed);
  const DetectorProfile profile =
      effective_profile(config, feature_nodes(prepared.generator));
  const uint64_t detection_base = substream_seed(config.seed, kStreamDetections);
  prepared.detections.reserve(prepared.truths.size());
  for (size_t i = 0; i < prepared.truths.size(); ++i) {
    prepared.detections.push_back(simulate_detections(
        prepared.truths[i], profile, detection_base + static_cast<uint64_t>(i)));
  }

  prepared.folds = kfold_split(config.cohort_size, config.folds,
                               substream_seed(config.seed, kStreamFolds));

  NetworkStructure structure;
  structure.variables = prepared.generator.variables();
  for (int v = 0; v < prepared.generator.size(); ++v) {
    const auto& parents = prepared.generator.parents(v);
    if (parents.empty()) continue;
    auto& slot = structure.parents[prepared.generator.variable(v).id];
    for (int p : parents) slot.push_back(prepared.generator.variable(p).id);
  }
  const Dataset all = truths_to_dataset(prepared.generator, prepared.truths);
  for (const auto& fold : prepared.folds) {
    Dataset train;
    train.schema = all.schema;
    for (int i : fold.train) {
      train.rows.push_back(all.rows[i]);
      train.patient_ids.push_back(all.patient_ids[i]);
    }
    prepared.fitted.push_back(
        fit_cpds(structure, train, LearningConfig{config.alpha}));
  }
  return prepared;
}

namespace {

// Evidence from the true labels of every feature node.
Evidence evidence_from_truth(const BayesianNetwork& net,
                             const PatientTruth& truth) {
  Evidence evidence;
  for (const auto& [fx, present] : truth.features) {
    const Variable& var = net.variable(net.index_of(fx));
    int state_present = 1, state_absent = 0;
    for (size_t s = 0; s < var.states.size(); ++s) {
      if (var.states[s] == "present") state_present = static_cast<int>(s);
      if (var.states[s] == "absent") state_absent = static_cast<int>(s);
    }
    evidence.assignments[fx] = present ? state_present : state_absent;
  }
  return evidence;
}

// Detections at or above `floor` taken directly as present evidence.
Evidence evidence_from_floor(const BayesianNetwork& net,
                             const ScoredDetections& detections, double floor,
                             EvidenceMode mode) {
  std::set<std::string> above;
  for (const auto& [fx, score] : detections.scores) {
    if (score >= floor) above.insert(fx);
  }
  return evidence_from_detections(net, above, mode);
}

struct FoldScores {
  std::vector<double> p_r, p_t;
  std::vector<int> truth_r, truth_t;

  void add(const InstabilityScores& scores, const PatientTruth& truth) {
    p_r.push_back(scores.p_r_unstable);
    p_t.push_back(scores.p_t_unstable);
    truth_r.push_back(truth.r_unstable);
    truth_t.push_back(truth.t_unstable);
  }
};

int grade_label(bool r_unstable, bool t_unstable) {
  return static_cast<int>(tile_from_instabilities(r_unstable, t_unstable));
}

void append_fold(ConditionScores& condition, const FoldScores& fold) {
  condition.auc_r.push_back(roc_auc(fold.p_r, fold.truth_r));
  condition.auc_t.push_back(roc_auc(fold.p_t, fold.truth_t));
  std::vector<int> pred_r, pred_t, pred_grade, truth_grade;
  for (size_t i = 0; i < fold.p_r.size(); ++i) {
    pred_r.push_back(fold.p_r[i] > 0.5 ? 1 : 0);
    pred_t.push_back(fold.p_t[i] > 0.5 ? 1 : 0);
    pred_grade.push_back(grade_label(fold.p_r[i] > 0.5, fold.p_t[i] > 0.5));
    truth_grade.push_back(grade_label(fold.truth_r[i] == 1, fold.truth_t[i] == 1));
  }
  condition.kappa_r.push_back(cohens_kappa(pred_r, fold.truth_r));
  condition.kappa_t.push_back(cohens_kappa(pred_t, fold.truth_t));
  condition.tile_kappa.push_back(cohens_kappa(pred_grade, truth_grade));
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& config,
                                const PreparedExperiment& prepared) {
  config.validate();
  ExperimentReport report;
  report.config = config;

  for (size_t f = 0; f < prepared.folds.size(); ++f) {
    const BayesianNetwork& model = prepared.fitted[f];
    FoldScores gt, low, high, refined;
    for (int i : prepared.folds[f].test) {
      const PatientTruth& truth = prepared.truths[i];
      const ScoredDetections& detections = prepared.detections[i];

      gt.add(predict_instabilities(model, evidence_from_truth(model, truth)),
             truth);
      low.add(predict_instabilities(
                  model, evidence_from_floor(model, detections,
                                             config.thresholds.z_low, config.mode)),
              truth);
      high.add(predict_instabilities(
                   model, evidence_from_floor(model, detections,
                                              config.thresholds.z_high, config.mode)),
               truth);
      const RefinementResult r = refine(model, detections, config.thresholds,
                                        config.mode, config.policy);
      refined.add(r.after, truth);
    }
    append_fold(report.gt, gt);
    append_fold(report.fx_low, low);
    append_fold(report.fx_high, high);
    append_fold(report.refined, refined);
  }
  return report;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  return run_experiment(config, prepare_experiment(config));
}

std::vector<SweepRow> sweep_z_low(const ExperimentConfig& config,
                                  const std::vector<double>& z_values) {
  if (z_values.empty()) {
    fail(ErrorCode::ConfigInvalid, "empty sweep value list");
  }
  for (size_t i = 0; i < z_values.size(); ++i) {
    if (z_values[i] >= config.thresholds.z_high) {
      fail(ErrorCode::ConfigInvalid, "sweep value " + format_double(z_values[i]) +
                                         " is not below z_high");
    }
    if (i > 0 && z_values[i] <= z_values[i - 1]) {
      fail(ErrorCode::ConfigInvalid, "sweep values must be strictly increasing");
    }
  }

  const PreparedExperiment prepared = prepare_experiment(config);

  // Ground truth does not depend on the threshold; compute it once.
  std::vector<double> gt_auc_r, gt_auc_t;
  for (size_t f = 0; f < prepared.folds.size(); ++f) {
    FoldScores gt;
    for (int i : prepared.folds[f].test) {
      gt.add(predict_instabilities(
                 prepared.fitted[f],
                 evidence_from_truth(prepared.fitted[f], prepared.truths[i])),
             prepared.truths[i]);
    }
    gt_auc_r.push_back(roc_auc(gt.p_r, gt.truth_r));
    gt_auc_t.push_back(roc_auc(gt.p_t, gt.truth_t));
  }
  const double gt_r = mean_of(gt_auc_r);
  const double gt_t = mean_of(gt_auc_t);

  std::vector<SweepRow> rows;
  rows.reserve(z_values.size());
  for (double z : z_values) {
    ThresholdConfig thresholds = config.thresholds;
    thresholds.z_low = z;
    std::vector<double> base_r, base_t, refined_r, refined_t;
    for (size_t f = 0; f < prepared.folds.size(); ++f) {
      const BayesianNetwork& model = prepared.fitted[f];
      FoldScores baseline, refined;
      for (int i : prepared.folds[f].test) {
        const PatientTruth& truth = prepared.truths[i];
        const ScoredDetections& detections = prepared.detections[i];
        baseline.add(
            predict_instabilities(
                model, evidence_from_floor(model, detections, z, config.mode)),
            truth);
        const RefinementResult r =
            refine(model, detections, thresholds, config.mode, config.policy);
        refined.add(r.after, truth);
      }
      base_r.push_back(roc_auc(baseline.p_r, baseline.truth_r));
      base_t.push_back(roc_auc(baseline.p_t, baseline.truth_t));
      refined_r.push_back(roc_auc(refined.p_r, refined.truth_r));
      refined_t.push_back(roc_auc(refined.p_t, refined.truth_t));
    }
    SweepRow row;
    row.z = z;
    row.auc_r = mean_of(base_r);
    row.auc_t = mean_of(base_t);
    row.auc_r_refined = mean_of(refined_r);
    row.auc_t_refined = mean_of(refined_t);
    row.auc_r_gt = gt_r;
    row.auc_t_gt = gt_t;
    rows.push_back(row);
  }
  return rows;
}

namespace {

void write_condition(JsonWriter& w, const char* name,
                     const ConditionScores& condition) {
  w.key(name).begin_object();
  auto write_series = [&w](const char* key, const std::vector<double>& values,
                           double mean) {
    w.key(key).begin_array();
    for (double v : values) w.value(v);
    w.end_array();
    w.key(std::string(key) + "_mean").value(mean);
  };
  write_series("auc_r", condition.auc_r, condition.mean_auc_r());
  write_series("auc_t", condition.auc_t, condition.mean_auc_t());
  write_series("kappa_r", condition.kappa_r, condition.mean_kappa_r());
  write_series("kappa_t", condition.kappa_t, condition.mean_kappa_t());
  write_series("tile_kappa", condition.tile_kappa, condition.mean_tile_kappa());
  w.end_object();
}

}  // namespace

std::string report_to_string(const ExperimentReport& report) {
  const ExperimentConfig& config = report.config;
  JsonWriter w;
  w.begin_object();
  w.key("format").value("tilebn-experiment-report/1");
  w.key("config").begin_object();
  w.key("fixture").value(config.fixture_path);
  w.key("cohort_size").value(config.cohort_size);
  w.key("seed").value(static_cast<uint64_t>(config.seed));
  w.key("folds").value(config.folds);
  w.key("z_high").value(config.thresholds.z_high);
  w.key("z_low").value(config.thresholds.z_low);
  w.key("z_promote").value(config.thresholds.z_promote);
  w.key("evidence_mode")
      .value(config.mode == EvidenceMode::PresentOnly ? "present_only"
                                                      : "closed_world");
  w.key("promotion_policy")
      .value(config.policy == PromotionPolicy::Immediate ? "immediate"
                                                         : "batch_at_end");
  w.key("alpha").value(config.alpha);
  w.key("age_threshold").value(config.age_threshold);
  w.end_object();
  w.key("conditions").begin_object();
  write_condition(w, "BM_GT", report.gt);
  write_condition(w, "BM_FX_low", report.fx_low);
  write_condition(w, "BM_FX_high", report.fx_high);
  write_condition(w, "BM_refined", report.refined);
  w.end_object();
  w.end_object();
  return w.str();
}

std::string report_summary_text(const ExperimentReport& report) {
  std::ostringstream out;
  char line[160];
  out << "condition      AUC(R)  AUC(T)  kappa(R)  kappa(T)  tile-kappa\n";
  const std::pair<const char*, const ConditionScores*> rows[] = {
      {"BM(GT)", &report.gt},
      {"BM(FX_low)", &report.fx_low},
      {"BM(FX_high)", &report.fx_high},
      {"BM(refined)", &report.refined},
  };
  for (const auto& [name, condition] : rows) {
    std::snprintf(line, sizeof(line),
                  "%-13s  %6.3f  %6.3f  %8.3f  %8.3f  %10.3f\n", name,
                  condition->mean_auc_r(), condition->mean_auc_t(),
                  condition->mean_kappa_r(), condition->mean_kappa_t(),
                  condition->mean_tile_kappa());
    out << line;
  }
  return out.str();
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << "z,auc_r,auc_t,auc_r_refined,auc_t_refined,auc_r_gt,auc_t_gt\n";
  for (const auto& row : rows) {
    out << format_double(row.z) << ',' << format_double(row.auc_r) << ','
        << format_double(row.auc_t) << ',' << format_double(row.auc_r_refined)
        << ',' << format_double(row.auc_t_refined) << ','
        << format_double(row.auc_r_gt) << ',' << format_double(row.auc_t_gt)
        << '\n';
  }
  return out.str();
}

namespace {

std::string strip(const std::string& text) {
  size_t begin = text.find_first_not_of(" \t");
  if (begin == std::string::npos) return "";
  size_t end = text.find_last_not_of(" \t");
  return text.substr(begin, end - begin + 1);
}

// Removes a trailing comment that is not inside a quoted string.
std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

struct TomlValue {
  std::string text;
  int line = 0;
};

// Flat TOML subset: 'key = value' lines, [section] and [section."quoted"]
// headers flattened into dotted keys. Values stay raw; typed accessors below
// convert on demand.
std::map<std::string, TomlValue> parse_toml_subset(const std::string& text,
                                                   const std::string& origin) {
  std::map<std::string, TomlValue> values;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip(strip_comment(line));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        fail(ErrorCode::ConfigInvalid,
             origin + ":" + std::to_string(line_no) + ": unterminated section");
      }
      std::string inner = strip(line.substr(1, line.size() - 2));
      // Quoted segments may contain dots and spaces.
      std::string flattened;
      bool quoted = false;
      for (char c : inner) {
        if (c == '"') {
          quoted = !quoted;
        } else if (c == '.' && !quoted) {
          flattened += '\x1f';
        } else {
          flattened += c;
        }
      }
      section = flattened;
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos) {
      fail(ErrorCode::ConfigInvalid,
           origin + ":" + std::to_string(line_no) + ": expected 'key = value'");
    }
    std::string key = strip(line.substr(0, eq));
    if (!key.empty() && key.front() == '"' && key.back() == '"') {
      key = key.substr(1, key.size() - 2);
    }
    const std::string full_key =
        section.empty() ? key : section + '\x1f' + key;
    values[full_key] = {strip(line.substr(eq + 1)), line_no};
  }
  return values;
}

double to_number(const TomlValue& value, const std::string& origin) {
  try {
    size_t used = 0;
    const double number = std::stod(value.text, &used);
    if (used != value.text.size()) throw std::invalid_argument(value.text);
    return number;
  } catch (const std::exception&) {
    fail(ErrorCode::ConfigInvalid, origin + ":" + std::to_string(value.line) +
                                       ": '" + value.text + "' is not a number");
  }
}

std::string to_string_value(const TomlValue& value, const std::string& origin) {
  std::string text = value.text;
  if (text.size() >= 2 && text.front() == '"' && text.back() == '"') {
    return text.substr(1, text.size() - 2);
  }
  fail(ErrorCode::ConfigInvalid, origin + ":" + std::to_string(value.line) +
                                     ": expected a quoted string");
}

BetaShape to_beta(const TomlValue& value, const std::string& origin) {
  std::string text = value.text;
  if (text.size() < 2 || text.front() != '[' || text.back() != ']') {
    fail(ErrorCode::ConfigInvalid, origin + ":" + std::to_string(value.line) +
                                       ": expected [alpha, beta]");
  }
  std::istringstream in(text.substr(1, text.size() - 2));
  std::string part;
  std::vector<double> numbers;
  while (std::getline(in, part, ',')) {
    numbers.push_back(to_number({strip(part), value.line}, origin));
  }
  if (numbers.size() != 2) {
    fail(ErrorCode::ConfigInvalid, origin + ":" + std::to_string(value.line) +
                                       ": expected exactly two shape values");
  }
  return {numbers[0], numbers[1]};
}

EvidenceMode mode_from_string(const std::string& text, const std::string& origin) {
  if (text == "present_only" || text == "present-only") {
    return EvidenceMode::PresentOnly;
  }
  if (text == "closed_world" || text == "closed-world") {
    return EvidenceMode::ClosedWorld;
  }
  fail(ErrorCode::ConfigInvalid, origin + ": unknown evidence mode '" + text + "'");
}

PromotionPolicy policy_from_string(const std::string& text,
                                   const std::string& origin) {
  if (text == "immediate") return PromotionPolicy::Immediate;
  if (text == "batch_at_end" || text == "batch") return PromotionPolicy::BatchAtEnd;
  fail(ErrorCode::ConfigInvalid,
       origin + ": unknown promotion policy '" + text + "'");
}

ExperimentConfig config_from_json(const std::string& text,
                                  const std::string& origin) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::ConfigInvalid, origin + ": " + e.what());
  }
  ExperimentConfig config;
  config.fixture_path = doc.value("fixture", "");
  config.cohort_size = doc.value("cohort_size", config.cohort_size);
  config.seed = doc.value("seed", config.seed);
  config.folds = doc.value("folds", config.folds);
  config.thresholds.z_high = doc.value("z_high", config.thresholds.z_high);
  config.thresholds.z_low = doc.value("z_low", config.thresholds.z_low);
  config.thresholds.z_promote = doc.value("z_promote", config.thresholds.z_high);
  if (doc.contains("evidence_mode")) {
    config.mode = mode_from_string(doc["evidence_mode"].get<std::string>(), origin);
  }
  if (doc.contains("promotion_policy")) {
    config.policy =
        policy_from_string(doc["promotion_policy"].get<std::string>(), origin);
  }
  config.alpha = doc.value("alpha", config.alpha);
  config.age_threshold = doc.value("age_threshold", config.age_threshold);
  if (doc.contains("profile")) {
    for (const auto& [fx, body] : doc["profile"].items()) {
      ClassProfileOverride override_values;
      if (body.contains("tp_rate")) override_values.tp_rate = body["tp_rate"].get<double>();
      if (body.contains("fp_rate")) override_values.fp_rate = body["fp_rate"].get<double>();
      if (body.contains("tp_confidence")) {
        override_values.tp_confidence =
            BetaShape{body["tp_confidence"][0].get<double>(),
                      body["tp_confidence"][1].get<double>()};
      }
      if (body.contains("fp_confidence")) {
        override_values.fp_confidence =
            BetaShape{body["fp_confidence"][0].get<double>(),
                      body["fp_confidence"][1].get<double>()};
      }
      config.profile_overrides[fx] = override_values;
    }
  }
  return config;
}

}  // namespace

ExperimentConfig experiment_config_from_string(const std::string& text,
                                               const std::string& origin) {
  const size_t first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    return config_from_json(text, origin);
  }

  const auto values = parse_toml_subset(text, origin);
  ExperimentConfig config;
  bool z_promote_set = false;
  for (const auto& [key, value] : values) {
    if (key == "fixture") {
      config.fixture_path = to_string_value(value, origin);
    } else if (key == "cohort_size") {
      config.cohort_size = static_cast<int>(to_number(value, origin));
    } else if (key == "seed") {
      config.seed = static_cast<uint64_t>(to_number(value, origin));
    } else if (key == "folds") {
      config.folds = static_cast<int>(to_number(value, origin));
    } else if (key == "z_high") {
      config.thresholds.z_high = to_number(value, origin);
    } else if (key == "z_low") {
      config.thresholds.z_low = to_number(value, origin);
    } else if (key == "z_promote") {
      config.thresholds.z_promote = to_number(value, origin);
      z_promote_set = true;
    } else if (key == "evidence_mode") {
      config.mode = mode_from_string(to_string_value(value, origin), origin);
    } else if (key == "promotion_policy") {
      config.policy = policy_from_string(to_string_value(value, origin), origin);
    } else if (key == "alpha") {
      config.alpha = to_number(value, origin);
    } else if (key == "age_threshold") {
      config.age_threshold = static_cast<int>(to_number(value, origin));
    } else if (key.rfind("profile\x1f", 0) == 0) {
      const size_t class_begin = std::string("profile\x1f").size();
      const size_t class_end = key.rfind('\x1f');
      if (class_end <= class_begin) {
        fail(ErrorCode::ConfigInvalid,
             origin + ": malformed profile override key");
      }
      const std::string fx = key.substr(class_begin, class_end - class_begin);
      const std::string field = key.substr(class_end + 1);
      ClassProfileOverride& override_values = config.profile_overrides[fx];
      if (field == "tp_rate") {
        override_values.tp_rate = to_number(value, origin);
      } else if (field == "fp_rate") {
        override_values.fp_rate = to_number(value, origin);
      } else if (field == "tp_confidence") {
        override_values.tp_confidence = to_beta(value, origin);
      } else if (field == "fp_confidence") {
        override_values.fp_confidence = to_beta(value, origin);
      } else {
        fail(ErrorCode::ConfigInvalid,
             origin + ": unknown profile field '" + field + "'");
      }
    } else {
      fail(ErrorCode::ConfigInvalid,
           origin + ":" + std::to_string(value.line) + ": unknown key '" + key + "'");
    }
  }
  if (!z_promote_set) config.thresholds.z_promote = config.thresholds.z_high;
  return config;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  ExperimentConfig config = experiment_config_from_string(read_file(path), path);
  namespace fs = std::filesystem;
  if (!config.fixture_path.empty() && fs::path(config.fixture_path).is_relative()) {
    const fs::path base = fs::path(path).parent_path();
    if (!base.empty()) {
      config.fixture_path = (base / config.fixture_path).string();
    }
  }
  return config;
}

}  // namespace tilebn
