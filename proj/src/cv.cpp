#include "cmc/cv.hpp"

#include <cmath>

#include "cmc/error.hpp"
#include "cmc/rng.hpp"

namespace cmc {

std::vector<Eigen::Index> FoldPlan::validation_rows(int fold) const {
  std::vector<Eigen::Index> out;
  for (std::size_t i = 0; i < assignment.size(); ++i)
    if (assignment[i] == fold) out.push_back(static_cast<Eigen::Index>(i));
  return out;
}

std::vector<Eigen::Index> FoldPlan::training_rows(int fold) const {
  std::vector<Eigen::Index> out;
  for (std::size_t i = 0; i < assignment.size(); ++i)
    if (assignment[i] != fold) out.push_back(static_cast<Eigen::Index>(i));
  return out;
}

FoldPlan stratified_folds(const Eigen::VectorXd& labels, int k, std::uint64_t seed) {
  if (k < 2) throw DataError("stratified_folds: need at least 2 folds, got " + std::to_string(k));
  std::vector<Eigen::Index> pos, neg;
  for (Eigen::Index i = 0; i < labels.size(); ++i) (labels(i) > 0 ? pos : neg).push_back(i);
  if (pos.empty() || neg.empty()) throw DataError("stratified_folds: one class is empty");

  Rng rng_pos(seed, {hash_label("folds"), 1});
  Rng rng_neg(seed, {hash_label("folds"), 0});
  rng_pos.shuffle(pos);
  rng_neg.shuffle(neg);

  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  plan.assignment.assign(static_cast<std::size_t>(labels.size()), -1);
  std::size_t slot = 0;
  for (auto i : pos) plan.assignment[static_cast<std::size_t>(i)] = static_cast<int>(slot++ % static_cast<std::size_t>(k));
  for (auto i : neg) plan.assignment[static_cast<std::size_t>(i)] = static_cast<int>(slot++ % static_cast<std::size_t>(k));
  return plan;
}

ConfusionCounts confusion(const Eigen::VectorXd& truth, const Eigen::VectorXd& predicted) {
  if (truth.size() != predicted.size()) throw DimensionError("confusion: length mismatch");
  ConfusionCounts c;
  for (Eigen::Index i = 0; i < truth.size(); ++i) {
    const bool actual = truth(i) > 0, said = predicted(i) > 0;
    if (actual && said) ++c.tp;
    else if (actual) ++c.fn;
    else if (said) ++c.fp;
    else ++c.tn;
  }
  return c;
}

ClassificationRates classification_metrics(const ConfusionCounts& c) {
  if (c.total() <= 0) throw UndefinedMetricError("accuracy undefined: empty validation fold");
  if (c.tp + c.fn <= 0) throw UndefinedMetricError("recall undefined: no positives in validation fold");
  if (c.tn + c.fp <= 0) throw UndefinedMetricError("specificity undefined: no negatives in validation fold");
  ClassificationRates r;
  r.accuracy = static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
  r.recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  r.specificity = static_cast<double>(c.tn) / static_cast<double>(c.tn + c.fp);
  return r;
}

MeanSd aggregate_folds(std::span<const double> per_fold) {
  if (per_fold.empty()) throw DataError("aggregate_folds: no folds");
  const auto k = static_cast<double>(per_fold.size());
  double sum = 0.0;
  for (double v : per_fold) sum += v;
  const double mean = sum / k;
  double ss = 0.0;
  for (double v : per_fold) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / k)};
}

}  // namespace cmc
