#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

namespace cmc {

// Subject i belongs to fold `assignment[i]`.
struct FoldPlan {
  int k = 4;
  std::uint64_t seed = 0;
  std::vector<int> assignment;

  std::vector<Eigen::Index> validation_rows(int fold) const;
  std::vector<Eigen::Index> training_rows(int fold) const;
};

// Seeded shuffle within each class, then round-robin. Negatives continue the
// rotation where positives stopped so fold sizes stay balanced.
FoldPlan stratified_folds(const Eigen::VectorXd& labels, int k, std::uint64_t seed);

struct ConfusionCounts {
  long tp = 0, fp = 0, tn = 0, fn = 0;
  long total() const { return tp + fp + tn + fn; }
  bool operator==(const ConfusionCounts&) const = default;
};

ConfusionCounts confusion(const Eigen::VectorXd& truth, const Eigen::VectorXd& predicted);

struct ClassificationRates {
  double accuracy = 0.0;
  double recall = 0.0;
  double specificity = 0.0;
};

// Throws UndefinedMetricError when a denominator is zero.
ClassificationRates classification_metrics(const ConfusionCounts& c);

struct MeanSd {
  double mean = 0.0;
  double sd = 0.0;  // population (divide by k)
};

MeanSd aggregate_folds(std::span<const double> per_fold);

}  // namespace cmc
