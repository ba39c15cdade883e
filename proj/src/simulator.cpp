#include "tilebn/simulator.hpp"

#include <cstdio>

#include "tilebn/error.hpp"

namespace tilebn {

void DetectorProfile::validate() const {
  for (const auto& [fx, profile] : classes) {
    if (profile.tp_rate < 0.0 || profile.tp_rate > 1.0 ||
        profile.fp_rate < 0.0 || profile.fp_rate > 1.0) {
      fail(ErrorCode::ProfileMismatch, "rates for '" + fx + "' outside [0, 1]");
    }
    if (profile.tp_confidence.alpha <= 0.0 || profile.tp_confidence.beta <= 0.0 ||
        profile.fp_confidence.alpha <= 0.0 || profile.fp_confidence.beta <= 0.0) {
      fail(ErrorCode::ProfileMismatch, "beta shapes for '" + fx +
                                           "' must be positive");
    }
  }
}

std::vector<PatientTruth> sample_cohort(const BayesianNetwork& network, int n,
                                        uint64_t seed) {
  if (n < 1) {
    fail(ErrorCode::ConfigInvalid, "cohort size must be at least 1");
  }
  if (network.index_of(kRotationalId) < 0 || network.index_of(kTranslationalId) < 0) {
    fail(ErrorCode::MissingRequiredNode, "network lacks R or T");
  }
  const std::vector<std::string> features = feature_nodes(network);
  if (features.empty()) {
    fail(ErrorCode::MissingRequiredNode, "network has no feature nodes");
  }

  const int age_index = network.index_of(kAgeId);
  const int r_index = network.index_of(kRotationalId);
  const int t_index = network.index_of(kTranslationalId);

  std::vector<PatientTruth> cohort;
  cohort.reserve(n);
  for (int i = 0; i < n; ++i) {
    Xoshiro256pp rng(seed + static_cast<uint64_t>(i));
    std::vector<int> state(network.size(), 0);
    for (const auto& id : network.topological_ids()) {
      const int v = network.index_of(id);
      const auto& row = network.cpd(v)[network.cpd_row(v, state)];
      const double u = rng.uniform();
      double cumulative = 0.0;
      int drawn = static_cast<int>(row.size()) - 1;
      for (size_t s = 0; s < row.size(); ++s) {
        cumulative += row[s];
        if (u < cumulative) {
          drawn = static_cast<int>(s);
          break;
        }
      }
      state[v] = drawn;
    }

    PatientTruth truth;
    char buffer[16];
    std::snprintf(buffer, sizeof(buffer), "p%06d", i + 1);
    truth.patient_id = buffer;
    truth.elderly = age_index >= 0 ? state[age_index] : 0;
    truth.r_unstable = state[r_index];
    truth.t_unstable = state[t_index];
    for (const auto& fx : features) {
      truth.features[fx] = state[network.index_of(fx)];
    }
    cohort.push_back(std::move(truth));
  }
  return cohort;
}

ScoredDetections simulate_detections(const PatientTruth& truth,
                                     const DetectorProfile& profile,
                                     uint64_t seed) {
  profile.validate();
  for (const auto& [fx, present] : truth.features) {
    (void)present;
    if (!profile.classes.count(fx)) {
      fail(ErrorCode::ProfileMismatch, "profile has no entry for '" + fx + "'");
    }
  }

  Xoshiro256pp rng(seed);
  ScoredDetections detections;
  detections.patient_id = truth.patient_id;
  for (const auto& [fx, present] : truth.features) {
    const ClassProfile& cls = profile.classes.at(fx);
    const double emit_rate = present ? cls.tp_rate : cls.fp_rate;
    const BetaShape& shape = present ? cls.tp_confidence : cls.fp_confidence;
    const double u = rng.uniform();
    if (u < emit_rate) {
      detections.scores[fx] = sample_beta(rng, shape.alpha, shape.beta);
    }
  }
  return detections;
}

DetectorProfile default_profile(const std::vector<std::string>& feature_classes) {
  // Curated operating points for the pelvic classes; anything else gets the
  // generic profile. Rates stay inside the documented ranges.
  const std::map<std::string, ClassProfile> curated = {
      {"PSD", {0.90, 0.02, {8.0, 2.0}, {2.0, 5.0}}},
      {"ring fx", {0.85, 0.10, {8.0, 2.0}, {2.0, 5.0}}},
      {"anteriorly divergent SI", {0.60, 0.05, {6.0, 3.0}, {2.0, 5.0}}},
      {"parallel SI", {0.78, 0.08, {8.0, 2.0}, {2.0, 5.0}}},
      {"non-diastatic sacral fx", {0.72, 0.09, {8.0, 2.0}, {2.0, 5.0}}},
      {"diastatic sacral fx", {0.80, 0.03, {8.0, 2.0}, {2.0, 5.0}}},
      {"ISp", {0.68, 0.06, {8.0, 2.0}, {2.0, 5.0}}},
  };
  DetectorProfile profile;
  for (const auto& fx : feature_classes) {
    auto it = curated.find(fx);
    profile.classes[fx] = it != curated.end() ? it->second : ClassProfile{};
  }
  return profile;
}

Dataset truths_to_dataset(const BayesianNetwork& network,
                          const std::vector<PatientTruth>& truths) {
  Dataset data;
  for (const auto& v : network.variables()) data.schema.push_back(v.id);
  const int age_index = network.index_of(kAgeId);
  for (const auto& truth : truths) {
    std::vector<int> row(data.schema.size(), 0);
    for (size_t c = 0; c < data.schema.size(); ++c) {
      const std::string& id = data.schema[c];
      if (static_cast<int>(c) == age_index) {
        row[c] = truth.elderly;
      } else if (id == kRotationalId) {
        row[c] = truth.r_unstable;
      } else if (id == kTranslationalId) {
        row[c] = truth.t_unstable;
      } else {
        row[c] = truth.features.at(id);
      }
    }
    data.rows.push_back(std::move(row));
    data.patient_ids.push_back(truth.patient_id);
  }
  return data;
}

}  // namespace tilebn
