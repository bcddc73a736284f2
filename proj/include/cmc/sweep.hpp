#pragma once

// Outer cross-validated component sweep: for each component count, tune on the
// training folds, train, and score the held-out fold.

#include <Eigen/Dense>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "cmc/cv.hpp"
#include "cmc/svm.hpp"
#include "cmc/tune.hpp"

namespace cmc {

struct FoldResult {
  ConfusionCounts counts;
  ClassificationRates rates;
  SvmHyperparams hyperparams;
  double inner_loss = 0.0;
};

struct SweepPoint {
  int component_count = 0;
  std::vector<FoldResult> folds;
  MeanSd accuracy, recall, specificity;
};

struct SweepCurve {
  std::string name;
  std::vector<SweepPoint> points;
};

struct OperatingPoint {
  int c0 = 0;
  SweepPoint point;
};

struct SweepOptions {
  int threads = 1;
};

// Features for every subject (rows in subject order) at component count k when
// fold `fold` is held out. The paper-faithful source ignores the fold.
using FeatureSource = std::function<Eigen::MatrixXd(int k, int fold)>;

SweepCurve run_sweep(const FeatureSource& features, int length, const Eigen::VectorXd& labels, const FoldPlan& plan,
                     const TuneConfig& tune, const SweepOptions& options = {}, std::string name = {});

// Features at step k: PCs 1..k then age.
SweepCurve sweep_individual(const Eigen::MatrixXd& scores, const Eigen::VectorXd& age, const Eigen::VectorXd& labels,
                            const FoldPlan& plan, const TuneConfig& tune, const SweepOptions& options = {},
                            std::string name = {});

struct CombinedInput {
  Eigen::MatrixXd scores;  // subjects x (at least c0) components
  int c0 = 1;
};

// Step k uses PCs 1..min(k, c0) of every set, then age once. Runs to the
// largest c0.
SweepCurve sweep_combined(std::span<const CombinedInput> sets, const Eigen::VectorXd& age,
                          const Eigen::VectorXd& labels, const FoldPlan& plan, const TuneConfig& tune,
                          const SweepOptions& options = {}, std::string name = "combined");
SweepCurve sweep_combined(const Eigen::MatrixXd& scores_a, int c0_a, const Eigen::MatrixXd& scores_b, int c0_b,
                          const Eigen::VectorXd& age, const Eigen::VectorXd& labels, const FoldPlan& plan,
                          const TuneConfig& tune, const SweepOptions& options = {});

// Feature layout used by sweep_combined at step k.
Eigen::MatrixXd combined_features(std::span<const CombinedInput> sets, const Eigen::VectorXd& age, int k);

// Smallest component count whose mean recall equals the curve's maximum.
OperatingPoint select_c0(const SweepCurve& curve);

// `component_count,acc_mean,acc_sd,recall_mean,recall_sd,spec_mean,spec_sd,fold0_C,fold0_s,...`
std::string sweep_csv(const SweepCurve& curve);
// Reads what sweep_csv writes. Fold confusion counts are not stored and come
// back zeroed.
SweepCurve parse_sweep_csv(std::string_view text, std::string name);

}  // namespace cmc
