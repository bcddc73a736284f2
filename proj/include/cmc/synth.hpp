#pragma once

// Seeded synthetic cohorts shaped like the target study, with a planted case
// shift in latent space and optional symptom/latent coupling.
//
// Per metric set with width w and latent dimension r:
//   t      ~ N(0, I_r) per subject, plus `delta` for case subjects
//   L      = thin Q of a seeded Gaussian w x r matrix, column i scaled by
//            sqrt(w) * decay^i so latent i stays recoverable as PC i
//   x      = t L' diag(scales) + noise_sd * N(0, I_w)
// Symptoms (case subjects only):
//   score  = clip(round(3 + s * z + (1 - s) * e), 1, 5)
// where z is the coupled latent standardized over cases and e ~ N(0, 1).

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "cmc/cohort.hpp"
#include "cmc/config.hpp"

namespace cmc {

struct SynthSet {
  std::string name;
  int width = 0;
  Eigen::VectorXd delta;  // case shift, latent units; empty means zero
};

struct SymptomCoupling {
  std::string set;
  int latent = 1;  // 1-based
  std::string symptom;
  double strength = 0.0;
};

struct SynthConfig {
  int n_controls = 22;
  int n_cases = 8;
  std::vector<SynthSet> sets = {{"dwi", 12, {}}, {"t1w", 1332, {}}};
  int latent_dim = 5;
  double latent_decay = 0.4;  // adjacent latent variances differ 6x, so sample PCs stay aligned
  double noise_sd = 1.0;
  double scale_low = 0.5, scale_high = 2.0;
  double age_min = 20.0, age_max = 60.0;
  std::vector<std::string> symptoms = default_symptom_names();
  std::vector<SymptomCoupling> couplings;
  double missing_rate = 0.0;
  std::uint64_t seed = 1;

  void validate() const;
  static SynthConfig from(const KeyValues& kv);
  KeyValues to_key_values() const;
};

struct GroundTruth {
  std::map<std::string, Eigen::MatrixXd> latent;  // subjects x r, subject order
  std::map<std::string, std::vector<int>> signal_latents;  // 1-based indices with nonzero delta
  std::vector<SymptomCoupling> couplings;
};

struct SynthCohort {
  CohortDataset dataset;
  GroundTruth truth;
};

SynthCohort generate_cohort(const SynthConfig& cfg);

// `subject_id,group,<set>_latent1,...`
std::string ground_truth_csv(const SynthCohort& cohort);

// Writes the cohort CSVs, ground_truth.csv, synth.cfg (config echo) and
// cohort.cfg (input paths usable by `run`).
CohortPaths write_synthetic(const SynthCohort& cohort, const SynthConfig& cfg, const std::filesystem::path& dir);

}  // namespace cmc
