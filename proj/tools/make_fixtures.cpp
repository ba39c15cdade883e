// Regenerates the versioned fixture files under fixtures/: the pelvic
// generating network for the synthetic cohort world, the small desk network
// used by the refinement walkthrough, the default experiment configuration,
// and a manifest recording the constants those fixtures reproduce.
//
// Usage: make_fixtures [--out-dir DIR] [--skip-manifest]

#include <cmath>
#include <cstring>
#include <iostream>
#include <sstream>
#include <string>

#include "tilebn/experiment.hpp"
#include "tilebn/json_writer.hpp"
#include "tilebn/learning.hpp"
#include "tilebn/network.hpp"
#include "tilebn/network_io.hpp"
#include "tilebn/simulator.hpp"

namespace {

using namespace tilebn;

std::vector<std::vector<double>> binary_rows(const std::vector<double>& present) {
  std::vector<std::vector<double>> rows;
  rows.reserve(present.size());
  for (double p : present) rows.push_back({1.0 - p, p});
  return rows;
}

// Feature classes in the order the grading template declares them.
const std::vector<std::string> kPelvicClasses = {
    "ring fx",
    "anteriorly divergent SI",
    "parallel SI",
    "non-diastatic sacral fx",
    "diastatic sacral fx",
    "PSD",
    "ISp",
};

// Generating network for the synthetic world. Present-probability rows are
// ordered [R=stable/T=stable, stable/unstable, unstable/stable,
// unstable/unstable]. Three classes carry the instability signal, with
// near-certain presence under global instability so the refinement loop has
// candidates to promote; the other four are background findings with
// grade-independent prevalence that stress the pipeline's handling of
// uninformative low-confidence detections.
BayesianNetwork pelvic_network() {
  NetworkStructure structure = default_pelvic_structure(kPelvicClasses, true);
  std::vector<Cpd> cpds;
  cpds.push_back({kAgeId, {}, {{0.70, 0.30}}});
  cpds.push_back({kRotationalId, {kAgeId}, binary_rows({0.35, 0.55})});
  cpds.push_back({kTranslationalId, {kAgeId}, binary_rows({0.25, 0.45})});
  const std::vector<std::string> fx_parents = {kRotationalId, kTranslationalId};
  cpds.push_back({"ring fx", fx_parents, binary_rows({0.45, 0.45, 0.45, 0.45})});
  cpds.push_back({"anteriorly divergent SI", fx_parents,
                  binary_rows({0.03, 0.10, 0.50, 0.97})});
  cpds.push_back({"parallel SI", fx_parents, binary_rows({0.35, 0.35, 0.35, 0.35})});
  cpds.push_back({"non-diastatic sacral fx", fx_parents,
                  binary_rows({0.30, 0.30, 0.30, 0.30})});
  cpds.push_back({"diastatic sacral fx", fx_parents,
                  binary_rows({0.02, 0.60, 0.08, 0.96})});
  cpds.push_back({"PSD", fx_parents, binary_rows({0.04, 0.30, 0.55, 0.97})});
  cpds.push_back({"ISp", fx_parents, binary_rows({0.10, 0.10, 0.10, 0.10})});
  return build_network(structure, cpds);
}

// Three-feature desk network: small enough to verify every number by
// enumeration, rich enough to walk the whole refinement loop (PSD alone
// grades B; a promoted divergent SI flips the grade to C).
BayesianNetwork desk_network() {
  NetworkStructure structure = default_pelvic_structure(
      {"PSD", "anteriorly divergent SI", "ring fx"}, false);
  std::vector<Cpd> cpds;
  cpds.push_back({kRotationalId, {}, {{0.60, 0.40}}});
  cpds.push_back({kTranslationalId, {}, {{0.70, 0.30}}});
  const std::vector<std::string> fx_parents = {kRotationalId, kTranslationalId};
  cpds.push_back({"PSD", fx_parents, binary_rows({0.05, 0.40, 0.70, 0.90})});
  cpds.push_back({"anteriorly divergent SI", fx_parents,
                  binary_rows({0.02, 0.30, 0.30, 0.97})});
  cpds.push_back({"ring fx", fx_parents, binary_rows({0.10, 0.50, 0.45, 0.60})});
  return build_network(structure, cpds);
}

std::string default_config_text(const std::string& fixture_name) {
  ExperimentConfig defaults;
  std::ostringstream out;
  out << "# Default synthetic evaluation run.\n"
      << "fixture = \"" << fixture_name << "\"\n"
      << "cohort_size = " << defaults.cohort_size << "\n"
      << "seed = " << defaults.seed << "\n"
      << "folds = " << defaults.folds << "\n"
      << "z_high = " << format_double(defaults.thresholds.z_high) << "\n"
      << "z_low = " << format_double(defaults.thresholds.z_low) << "\n"
      << "z_promote = " << format_double(defaults.thresholds.z_promote) << "\n"
      << "evidence_mode = \"present_only\"\n"
      << "promotion_policy = \"immediate\"\n"
      << "alpha = 1\n"
      << "age_threshold = 65\n";
  return out.str();
}

double refit_max_error(const BayesianNetwork& truth, uint64_t seed, int n) {
  const auto truths = sample_cohort(truth, n, seed);
  NetworkStructure structure;
  structure.variables = truth.variables();
  for (int v = 0; v < truth.size(); ++v) {
    if (truth.parents(v).empty()) continue;
    auto& slot = structure.parents[truth.variable(v).id];
    for (int p : truth.parents(v)) slot.push_back(truth.variable(p).id);
  }
  const BayesianNetwork fitted =
      fit_cpds(structure, truths_to_dataset(truth, truths), LearningConfig{1.0});
  double max_error = 0.0;
  for (int v = 0; v < truth.size(); ++v) {
    for (size_t row = 0; row < truth.cpd(v).size(); ++row) {
      for (size_t k = 0; k < truth.cpd(v)[row].size(); ++k) {
        max_error = std::max(
            max_error, std::fabs(truth.cpd(v)[row][k] - fitted.cpd(v)[row][k]));
      }
    }
  }
  return max_error;
}

}  // namespace

int main(int argc, char** argv) {
  std::string out_dir = "fixtures";
  bool with_manifest = true;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--out-dir") == 0 && i + 1 < argc) {
      out_dir = argv[++i];
    } else if (std::strcmp(argv[i], "--skip-manifest") == 0) {
      with_manifest = false;
    } else {
      std::cerr << "unknown argument: " << argv[i] << "\n";
      return 2;
    }
  }

  try {
    const BayesianNetwork pelvic = pelvic_network();
    const BayesianNetwork desk = desk_network();
    save_network(pelvic, out_dir + "/pelvic.net.json");
    save_network(desk, out_dir + "/desk.net.json");
    write_file_atomic(out_dir + "/default_experiment.toml",
                      default_config_text("pelvic.net.json"));
    std::cout << "wrote pelvic.net.json, desk.net.json, default_experiment.toml\n";

    if (with_manifest) {
      ExperimentConfig config;
      config.fixture_path = out_dir + "/pelvic.net.json";
      const ExperimentReport report = run_experiment(config);
      const double fit_error = refit_max_error(pelvic, config.seed, 20000);

      JsonWriter w;
      w.begin_object();
      w.key("format").value("tilebn-fixture-manifest/1");
      w.key("pelvic").begin_object();
      w.key("cohort_size").value(config.cohort_size);
      w.key("seed").value(static_cast<uint64_t>(config.seed));
      w.key("folds").value(config.folds);
      w.key("gt_auc_r_mean").value(report.gt.mean_auc_r());
      w.key("gt_auc_t_mean").value(report.gt.mean_auc_t());
      w.key("refined_auc_r_mean").value(report.refined.mean_auc_r());
      w.key("refined_auc_t_mean").value(report.refined.mean_auc_t());
      w.key("fx_high_auc_r_mean").value(report.fx_high.mean_auc_r());
      w.key("fx_high_auc_t_mean").value(report.fx_high.mean_auc_t());
      w.key("fx_low_auc_r_mean").value(report.fx_low.mean_auc_r());
      w.key("fx_low_auc_t_mean").value(report.fx_low.mean_auc_t());
      w.key("refit_samples").value(20000);
      w.key("refit_max_abs_error").value(fit_error);
      w.end_object();
      w.end_object();
      write_file_atomic(out_dir + "/manifest.json", w.str());
      std::cout << "wrote manifest.json (GT AUC R/T = "
                << report.gt.mean_auc_r() << "/" << report.gt.mean_auc_t()
                << ", refit max error = " << fit_error << ")\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "fixture generation failed: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
