#pragma once

// End-to-end run: load -> validate -> z-score per set -> control PCA ->
// project -> individual sweeps -> C0 per set -> combined sweep -> combined C0
// -> symptom correlations.

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cmc/cohort.hpp"
#include "cmc/config.hpp"
#include "cmc/normalizer.hpp"
#include "cmc/pca.hpp"
#include "cmc/rank_stats.hpp"
#include "cmc/sweep.hpp"
#include "cmc/tune.hpp"

namespace cmc {

inline constexpr std::string_view kToolVersion = "1.0.0";

// paper_faithful fits normalization and PCA once on all controls before the
// outer CV; nested refits both on the training controls of each outer fold.
enum class LeakageMode { paper_faithful, nested };

std::string_view leakage_label(LeakageMode m);
LeakageMode parse_leakage(std::string_view s);

struct RunConfig {
  std::filesystem::path subjects;
  std::vector<std::pair<std::string, std::filesystem::path>> metric_sets;  // order defines the combined layout
  std::optional<std::filesystem::path> symptoms;

  int outer_folds = 4;
  TuneConfig tune;
  LeakageMode mode = LeakageMode::paper_faithful;
  std::uint64_t fold_seed = 1;
  bool raw_age = false;
  bool combined = true;
  CorrelationOptions correlation;
  double sigma_floor = kDefaultSigmaFloor;
  int threads = 1;

  // Relative paths resolve against `base_dir`.
  static RunConfig from(const KeyValues& kv, const std::filesystem::path& base_dir);
  // Echo with absolute paths; feeding it back to `from` reproduces the run.
  KeyValues to_key_values() const;
  void validate() const;
};

struct SetResult {
  std::string name;
  NormalizationStats stats;
  PcaModel<double> pca;
  Eigen::MatrixXd scores;  // all subjects x k_max, paper-faithful projection
  SweepCurve curve;
  OperatingPoint operating_point;
};

struct RunArtifacts {
  ValidationReport validation;
  std::vector<SetResult> sets;
  std::optional<SweepCurve> combined_curve;
  std::optional<OperatingPoint> combined_point;
  std::vector<CorrelationRecord> correlations;
  KeyValues manifest;
  std::vector<std::string> notes;
};

RunArtifacts run_pipeline(const RunConfig& cfg);
RunArtifacts run_pipeline(const RunConfig& cfg, const CohortDataset& ds);

// performance_table.csv, correlations.csv, sweep_curve_<name>.csv and
// sweep_curve_<name>.svg for every curve.
void emit_report(const RunArtifacts& artifacts, const std::filesystem::path& out_dir);

// emit_report plus manifest.txt and per-set audit dumps (normalizer_<set>.csv,
// pca_<set>.csv).
void write_artifacts(const RunArtifacts& artifacts, const std::filesystem::path& out_dir);

// Re-renders performance_table.csv and the SVG charts from the sweep curve CSVs
// and manifest.txt in an artifact directory.
void render_report(const std::filesystem::path& artifact_dir);

struct PerformanceRow {
  std::string metric_set;
  int c0 = 0;
  MeanSd accuracy, recall, specificity;
};

PerformanceRow performance_row(const std::string& name, const OperatingPoint& op);
std::string performance_csv_line(const PerformanceRow& row);
std::string performance_table_csv(const std::vector<PerformanceRow>& rows);

}  // namespace cmc
