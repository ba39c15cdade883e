// Command-line front end for the pelvic instability grading toolkit.
//
// Subcommands: generate (synthetic cohort + detections), learn (fit CPDs
// from a cohort), infer (posterior marginals), candidates (per-grade
// counterfactual feature queries), refine (the detection refinement loop),
// evaluate (cross-validated condition comparison), sweep (low-confidence
// threshold sweep).
//
// Exit codes: 0 success, 1 internal error, 2 invalid input or configuration.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tilebn/error.hpp"
#include "tilebn/experiment.hpp"
#include "tilebn/inference.hpp"
#include "tilebn/json_writer.hpp"
#include "tilebn/learning.hpp"
#include "tilebn/network_io.hpp"
#include "tilebn/refinement.hpp"
#include "tilebn/simulator.hpp"

namespace {

using namespace tilebn;

EvidenceMode parse_mode(const std::string& text) {
  if (text == "present-only" || text == "present_only") {
    return EvidenceMode::PresentOnly;
  }
  if (text == "closed-world" || text == "closed_world") {
    return EvidenceMode::ClosedWorld;
  }
  fail(ErrorCode::ConfigInvalid, "unknown evidence mode '" + text + "'");
}

PromotionPolicy parse_policy(const std::string& text) {
  if (text == "immediate") return PromotionPolicy::Immediate;
  if (text == "batch" || text == "batch_at_end") return PromotionPolicy::BatchAtEnd;
  fail(ErrorCode::ConfigInvalid, "unknown promotion policy '" + text + "'");
}

void require_file(const std::string& path, const std::string& what) {
  if (!std::filesystem::exists(path)) {
    fail(ErrorCode::IoError, what + " not found: " + path);
  }
}

Evidence parse_observations(const BayesianNetwork& net,
                            const std::vector<std::string>& observations) {
  Evidence evidence;
  for (const auto& text : observations) {
    const size_t eq = text.find('=');
    if (eq == std::string::npos) {
      fail(ErrorCode::ConfigInvalid,
           "observation '" + text + "' is not var=state");
    }
    const std::string id = text.substr(0, eq);
    const std::string state = text.substr(eq + 1);
    const int index = net.index_of(id);
    if (index < 0) {
      fail(ErrorCode::ConfigInvalid, "unknown variable '" + id + "'");
    }
    const Variable& var = net.variable(index);
    int state_index = -1;
    for (size_t s = 0; s < var.states.size(); ++s) {
      if (var.states[s] == state) state_index = static_cast<int>(s);
    }
    if (state_index < 0) {
      fail(ErrorCode::ConfigInvalid,
           "variable '" + id + "' has no state '" + state + "'");
    }
    evidence.assignments[id] = state_index;
  }
  return evidence;
}

std::vector<double> parse_z_range(const std::string& text) {
  // "a:b:step" inclusive range, or a comma-separated list.
  std::vector<double> values;
  if (text.find(':') != std::string::npos) {
    double a = 0, b = 0, step = 0;
    if (std::sscanf(text.c_str(), "%lf:%lf:%lf", &a, &b, &step) != 3 ||
        step <= 0.0 || b < a) {
      fail(ErrorCode::ConfigInvalid, "bad z range '" + text + "'");
    }
    for (int i = 0;; ++i) {
      const double z = a + i * step;
      if (z > b + 1e-12) break;
      values.push_back(z);
    }
  } else {
    std::istringstream in(text);
    std::string part;
    while (std::getline(in, part, ',')) {
      values.push_back(std::stod(part));
    }
  }
  return values;
}

int cmd_generate(const std::string& fixture, int n, uint64_t seed,
                 const std::string& out_cohort, const std::string& out_detections) {
  require_file(fixture, "fixture");
  const BayesianNetwork net = load_network(fixture);
  const auto truths = sample_cohort(net, n, seed);

  NetworkStructure structure;
  structure.variables = net.variables();
  for (int v = 0; v < net.size(); ++v) {
    if (net.parents(v).empty()) continue;
    for (int p : net.parents(v)) {
      structure.parents[net.variable(v).id].push_back(net.variable(p).id);
    }
  }
  save_cohort(structure, truths_to_dataset(net, truths), out_cohort);

  const DetectorProfile profile = default_profile(feature_nodes(net));
  const uint64_t detection_base = substream_seed(seed, kStreamDetections);
  std::vector<ScoredDetections> detections;
  detections.reserve(truths.size());
  size_t emitted = 0;
  for (size_t i = 0; i < truths.size(); ++i) {
    detections.push_back(simulate_detections(truths[i], profile,
                                             detection_base + i));
    emitted += detections.back().scores.size();
  }
  save_detections(detections, out_detections);

  int unstable_r = 0, unstable_t = 0;
  for (const auto& truth : truths) {
    unstable_r += truth.r_unstable;
    unstable_t += truth.t_unstable;
  }
  std::cout << "generated " << truths.size() << " patients (" << unstable_r
            << " rotationally, " << unstable_t
            << " translationally unstable), " << emitted << " detections\n"
            << "cohort: " << out_cohort << "\ndetections: " << out_detections
            << "\n";
  return 0;
}

int cmd_learn(const std::string& structure_path, const std::string& cohort_path,
              const std::string& out_path, double alpha, int age_threshold) {
  require_file(structure_path, "structure");
  require_file(cohort_path, "cohort");
  const NetworkStructure structure = load_structure(structure_path);
  const Dataset data = ingest_cohort(cohort_path, structure, age_threshold);
  const BayesianNetwork fitted = fit_cpds(structure, data, LearningConfig{alpha});
  save_network(fitted, out_path);
  std::cout << "fitted CPDs for " << fitted.size() << " variables from "
            << data.rows.size() << " rows (alpha = " << alpha << ")\n"
            << "model: " << out_path << "\n";
  return 0;
}

int cmd_infer(const std::string& model_path,
              const std::vector<std::string>& observations,
              const std::vector<std::string>& targets) {
  require_file(model_path, "model");
  const BayesianNetwork net = load_network(model_path);
  const Evidence evidence = parse_observations(net, observations);
  const MarginalTable table = query_marginal(net, evidence, targets);
  for (size_t t = 0; t < table.targets.size(); ++t) {
    const Variable& var = net.variable(net.index_of(table.targets[t]));
    std::cout << "P(" << var.id << " | evidence) =";
    for (size_t s = 0; s < var.states.size(); ++s) {
      std::cout << (s == 0 ? " " : ", ") << var.states[s] << ": "
                << format_double(table.distributions[t][s]);
    }
    std::cout << "\n";
  }
  return 0;
}

int cmd_candidates(const std::string& model_path,
                   const std::vector<std::string>& fx_high_list,
                   const std::string& grade_text, const std::string& mode_text) {
  require_file(model_path, "model");
  const BayesianNetwork net = load_network(model_path);
  const std::set<std::string> fx_high(fx_high_list.begin(), fx_high_list.end());
  const TileGrade grade = grade_from_name(grade_text);
  const auto candidates =
      candidate_fractures(net, fx_high, grade, parse_mode(mode_text));
  std::cout << "candidates under grade " << grade_name(grade) << ":\n";
  for (const auto& [fx, p] : candidates) {
    std::printf("  %-28s %.6f\n", fx.c_str(), p);
  }
  return 0;
}

int cmd_refine(const std::string& model_path, const std::string& detections_path,
               const std::string& out_path, const ThresholdConfig& thresholds,
               const std::string& mode_text, const std::string& policy_text,
               const std::string& explain_patient) {
  require_file(model_path, "model");
  require_file(detections_path, "detections");
  const BayesianNetwork net = load_network(model_path);
  const auto patients = load_detections(detections_path);
  const EvidenceMode mode = parse_mode(mode_text);
  const PromotionPolicy policy = parse_policy(policy_text);
  thresholds.validate();

  std::vector<std::string> ids;
  std::vector<RefinementResult> results;
  std::map<std::string, int> grade_counts;
  size_t promotions = 0;
  for (const auto& patient : patients) {
    RefinementResult result = refine(net, patient, thresholds, mode, policy);
    ++grade_counts[grade_name(result.final_grade)];
    promotions += result.promoted.size();

    if (patient.patient_id == explain_patient) {
      std::cout << "patient " << patient.patient_id << ": initial grade "
                << grade_name(result.initial_grade) << "\n";
      for (TileGrade g : {TileGrade::A, TileGrade::B, TileGrade::C}) {
        std::cout << "  candidates given grade " << grade_name(g) << ":\n";
        for (const auto& [fx, p] :
             candidate_fractures(net, result.initial_sets.fx_high, g, mode)) {
          std::printf("    %-28s %.6f\n", fx.c_str(), p);
        }
      }
      std::cout << "  final grade " << grade_name(result.final_grade) << "\n";
    }

    ids.push_back(patient.patient_id);
    results.push_back(std::move(result));
  }
  if (!out_path.empty()) {
    write_file_atomic(out_path, refinement_report_to_string(
                                    ids, results, thresholds, mode, policy));
  }
  std::cout << "refined " << results.size() << " patients (z_high = "
            << thresholds.z_high << ", z_low = " << thresholds.z_low
            << ", z_promote = " << thresholds.z_promote << "): grades";
  for (const char* g : {"A", "B", "C"}) {
    std::cout << " " << g << "=" << grade_counts[g];
  }
  std::cout << ", promotions " << promotions << "\n";
  if (!out_path.empty()) std::cout << "report: " << out_path << "\n";
  return 0;
}

int cmd_evaluate(const std::string& config_path, const std::string& out_path) {
  require_file(config_path, "config");
  const ExperimentConfig config = load_experiment_config(config_path);
  require_file(config.fixture_path, "fixture");
  const ExperimentReport report = run_experiment(config);
  if (!out_path.empty()) {
    write_file_atomic(out_path, report_to_string(report));
  }
  std::cout << report_summary_text(report);
  if (!out_path.empty()) std::cout << "report: " << out_path << "\n";
  return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& z_text,
              const std::string& out_path) {
  require_file(config_path, "config");
  const ExperimentConfig config = load_experiment_config(config_path);
  require_file(config.fixture_path, "fixture");
  const std::vector<double> z_values = parse_z_range(z_text);
  const auto rows = sweep_z_low(config, z_values);
  const std::string csv = sweep_to_csv(rows);
  if (!out_path.empty()) write_file_atomic(out_path, csv);
  std::cout << csv;
  if (!out_path.empty()) std::cout << "table: " << out_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian-network pelvic instability grading toolkit"};
  app.require_subcommand(1);

  // generate
  auto* generate = app.add_subcommand("generate",
                                      "Sample a synthetic cohort and detections");
  std::string fixture, out_cohort, out_detections;
  int n = 2000;
  uint64_t seed = 20250401;
  generate->add_option("--fixture", fixture, "generating network file")->required();
  generate->add_option("--n", n, "number of patients");
  generate->add_option("--seed", seed, "random seed");
  generate->add_option("--out-cohort", out_cohort, "cohort CSV path")->required();
  generate->add_option("--out-detections", out_detections, "detections JSON path")
      ->required();

  // learn
  auto* learn = app.add_subcommand("learn", "Fit CPDs from a cohort");
  std::string structure_path, cohort_path, model_out;
  double alpha = 1.0;
  int age_threshold = 65;
  learn->add_option("--structure", structure_path, "network structure file")
      ->required();
  learn->add_option("--cohort", cohort_path, "cohort CSV")->required();
  learn->add_option("--out", model_out, "fitted model path")->required();
  learn->add_option("--alpha", alpha, "Dirichlet pseudocount");
  learn->add_option("--age-threshold", age_threshold, "elderly cutoff in years");

  // infer
  auto* infer = app.add_subcommand("infer", "Posterior marginals for targets");
  std::string model_path;
  std::vector<std::string> observations, targets;
  infer->add_option("--model", model_path, "network file")->required();
  infer->add_option("--observe", observations, "evidence as var=state");
  infer->add_option("--target", targets, "target variable")->required();

  // candidates
  auto* candidates = app.add_subcommand(
      "candidates", "Counterfactual feature probabilities for a grade");
  std::string cand_model, cand_grade = "C", cand_mode = "present-only";
  std::vector<std::string> fx_high_list;
  candidates->add_option("--model", cand_model, "network file")->required();
  candidates->add_option("--fx", fx_high_list, "high-confidence feature class");
  candidates->add_option("--grade", cand_grade, "hypothesized grade A|B|C");
  candidates->add_option("--mode", cand_mode, "present-only|closed-world");

  // refine
  auto* refine_cmd = app.add_subcommand("refine", "Run the refinement loop");
  std::string refine_model, detections_path, report_out, explain_patient;
  std::string mode_text = "present-only", policy_text = "immediate";
  ThresholdConfig thresholds;
  bool z_promote_given = false;
  refine_cmd->add_option("--model", refine_model, "network file")->required();
  refine_cmd->add_option("--detections", detections_path, "detections JSON")
      ->required();
  refine_cmd->add_option("--out", report_out, "refinement report path");
  refine_cmd->add_option("--z-high", thresholds.z_high, "high-confidence cut");
  refine_cmd->add_option("--z-low", thresholds.z_low, "low-confidence floor");
  refine_cmd
      ->add_option("--z-promote", thresholds.z_promote,
                   "promotion cut (defaults to z-high)")
      ->each([&](const std::string&) { z_promote_given = true; });
  refine_cmd->add_option("--mode", mode_text, "present-only|closed-world");
  refine_cmd->add_option("--policy", policy_text, "immediate|batch");
  refine_cmd->add_option("--explain", explain_patient,
                         "print per-grade candidates for this patient");

  // evaluate / sweep
  auto* evaluate = app.add_subcommand("evaluate", "Cross-validated evaluation");
  std::string eval_config, eval_out;
  evaluate->add_option("--config", eval_config, "experiment configuration")
      ->required();
  evaluate->add_option("--out", eval_out, "report JSON path");

  auto* sweep = app.add_subcommand("sweep", "Sweep the low-confidence floor");
  std::string sweep_config, sweep_z = "0.1:0.9:0.05", sweep_out;
  sweep->add_option("--config", sweep_config, "experiment configuration")
      ->required();
  sweep->add_option("--z", sweep_z, "range a:b:step or comma list");
  sweep->add_option("--out", sweep_out, "CSV output path");

  try {
    app.parse(argc, argv);
    if (generate->parsed()) {
      return cmd_generate(fixture, n, seed, out_cohort, out_detections);
    }
    if (learn->parsed()) {
      return cmd_learn(structure_path, cohort_path, model_out, alpha,
                       age_threshold);
    }
    if (infer->parsed()) {
      return cmd_infer(model_path, observations, targets);
    }
    if (candidates->parsed()) {
      return cmd_candidates(cand_model, fx_high_list, cand_grade, cand_mode);
    }
    if (refine_cmd->parsed()) {
      if (!z_promote_given) thresholds.z_promote = thresholds.z_high;
      return cmd_refine(refine_model, detections_path, report_out, thresholds,
                        mode_text, policy_text, explain_patient);
    }
    if (evaluate->parsed()) {
      return cmd_evaluate(eval_config, eval_out);
    }
    if (sweep->parsed()) {
      return cmd_sweep(sweep_config, sweep_z, sweep_out);
    }
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  } catch (const tilebn::Error& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
