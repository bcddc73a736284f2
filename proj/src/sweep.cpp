#include "cmc/sweep.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "cmc/csv.hpp"
#include "cmc/error.hpp"
#include "cmc/rng.hpp"

namespace cmc {

namespace {

// Runs body(i) for i in [0, n). Results must be written to per-index slots.
template <typename Body>
void parallel_for(std::size_t n, int threads, Body body) {
  const auto workers = static_cast<std::size_t>(std::max(1, threads));
  if (workers == 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < std::min(workers, n); ++w)
      pool.emplace_back([&] {
        for (auto i = next++; i < n; i = next++) {
          try {
            body(i);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
          }
        }
      });
  }
  if (error) std::rethrow_exception(error);
}

FoldResult evaluate_fold(const Eigen::MatrixXd& x, const Eigen::VectorXd& labels, const FoldPlan& plan, int fold,
                         const TuneConfig& tune, int k) {
  const auto tr = plan.training_rows(fold);
  const auto va = plan.validation_rows(fold);
  const Eigen::MatrixXd x_train = x(tr, Eigen::all);
  const Eigen::VectorXd y_train = labels(tr);
  TuneConfig cfg = tune;
  cfg.seed = stream_seed(tune.seed, {hash_label("tune"), static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(fold)});
  const auto tuned = optimize_hyperparams(x_train, y_train, cfg);
  const auto model = train_svm(x_train, y_train, tuned.best, tune.smo);

  FoldResult r;
  r.hyperparams = tuned.best;
  r.inner_loss = tuned.trace.evals[tuned.trace.best_index].loss;
  r.counts = confusion(labels(va), predict(model, x(va, Eigen::all)));
  r.rates = classification_metrics(r.counts);
  return r;
}

}  // namespace

SweepCurve run_sweep(const FeatureSource& features, int length, const Eigen::VectorXd& labels, const FoldPlan& plan,
                     const TuneConfig& tune, const SweepOptions& options, std::string name) {
  if (length < 1) throw DataError("sweep: sweep length must be at least 1");
  if (plan.assignment.size() != static_cast<std::size_t>(labels.size()))
    throw DimensionError("sweep: fold plan does not cover the subjects");
  tune.validate();
  const auto k_folds = static_cast<std::size_t>(plan.k);
  const auto cells = static_cast<std::size_t>(length) * k_folds;
  std::vector<FoldResult> results(cells);
  parallel_for(cells, options.threads, [&](std::size_t cell) {
    const int k = static_cast<int>(cell / k_folds) + 1;
    const int fold = static_cast<int>(cell % k_folds);
    const Eigen::MatrixXd x = features(k, fold);
    if (x.rows() != labels.size()) throw DimensionError("sweep: feature rows do not match labels");
    results[cell] = evaluate_fold(x, labels, plan, fold, tune, k);
  });

  SweepCurve curve;
  curve.name = std::move(name);
  for (int k = 1; k <= length; ++k) {
    SweepPoint p;
    p.component_count = k;
    std::vector<double> acc, rec, spec;
    for (std::size_t f = 0; f < k_folds; ++f) {
      const auto& r = results[static_cast<std::size_t>(k - 1) * k_folds + f];
      p.folds.push_back(r);
      acc.push_back(r.rates.accuracy);
      rec.push_back(r.rates.recall);
      spec.push_back(r.rates.specificity);
    }
    p.accuracy = aggregate_folds(acc);
    p.recall = aggregate_folds(rec);
    p.specificity = aggregate_folds(spec);
    curve.points.push_back(std::move(p));
  }
  return curve;
}

SweepCurve sweep_individual(const Eigen::MatrixXd& scores, const Eigen::VectorXd& age, const Eigen::VectorXd& labels,
                            const FoldPlan& plan, const TuneConfig& tune, const SweepOptions& options,
                            std::string name) {
  if (scores.rows() != labels.size() || age.size() != labels.size())
    throw DimensionError("sweep_individual: scores, age and labels must cover the same subjects");
  const auto length = static_cast<int>(scores.cols());
  FeatureSource source = [&](int k, int) {
    Eigen::MatrixXd x(scores.rows(), k + 1);
    x.leftCols(k) = scores.leftCols(k);
    x.col(k) = age;
    return x;
  };
  return run_sweep(source, length, labels, plan, tune, options, std::move(name));
}

Eigen::MatrixXd combined_features(std::span<const CombinedInput> sets, const Eigen::VectorXd& age, int k) {
  Eigen::Index width = 1;
  for (const auto& s : sets) width += std::min(k, s.c0);
  Eigen::MatrixXd x(age.size(), width);
  Eigen::Index col = 0;
  for (const auto& s : sets) {
    const int take = std::min(k, s.c0);
    x.middleCols(col, take) = s.scores.leftCols(take);
    col += take;
  }
  x.col(col) = age;
  return x;
}

SweepCurve sweep_combined(std::span<const CombinedInput> sets, const Eigen::VectorXd& age,
                          const Eigen::VectorXd& labels, const FoldPlan& plan, const TuneConfig& tune,
                          const SweepOptions& options, std::string name) {
  if (sets.empty()) throw DataError("sweep_combined: no metric sets");
  int length = 0;
  for (const auto& s : sets) {
    if (s.c0 < 1 || s.c0 > s.scores.cols())
      throw DimensionError("sweep_combined: operating point " + std::to_string(s.c0) + " exceeds available components");
    if (s.scores.rows() != labels.size()) throw DimensionError("sweep_combined: scores do not cover the subjects");
    length = std::max(length, s.c0);
  }
  FeatureSource source = [&](int k, int) { return combined_features(sets, age, k); };
  return run_sweep(source, length, labels, plan, tune, options, std::move(name));
}

SweepCurve sweep_combined(const Eigen::MatrixXd& scores_a, int c0_a, const Eigen::MatrixXd& scores_b, int c0_b,
                          const Eigen::VectorXd& age, const Eigen::VectorXd& labels, const FoldPlan& plan,
                          const TuneConfig& tune, const SweepOptions& options) {
  const std::vector<CombinedInput> sets = {{scores_a, c0_a}, {scores_b, c0_b}};
  return sweep_combined(sets, age, labels, plan, tune, options);
}

OperatingPoint select_c0(const SweepCurve& curve) {
  if (curve.points.empty()) throw DataError("select_c0: empty sweep curve");
  std::size_t best = 0;
  for (std::size_t i = 1; i < curve.points.size(); ++i)
    if (curve.points[i].recall.mean > curve.points[best].recall.mean) best = i;
  return {curve.points[best].component_count, curve.points[best]};
}

std::string sweep_csv(const SweepCurve& curve) {
  std::string out = "component_count,acc_mean,acc_sd,recall_mean,recall_sd,spec_mean,spec_sd";
  const std::size_t folds = curve.points.empty() ? 0 : curve.points.front().folds.size();
  for (std::size_t f = 0; f < folds; ++f) out += ",fold" + std::to_string(f) + "_C,fold" + std::to_string(f) + "_s";
  out += "\n";
  for (const auto& p : curve.points) {
    out += std::to_string(p.component_count);
    for (const auto& m : {p.accuracy, p.recall, p.specificity})
      out += "," + csv::format_double(m.mean) + "," + csv::format_double(m.sd);
    for (const auto& f : p.folds)
      out += "," + csv::format_double(f.hyperparams.box_constraint) + "," + csv::format_double(f.hyperparams.kernel_scale);
    out += "\n";
  }
  return out;
}

SweepCurve parse_sweep_csv(std::string_view text, std::string name) {
  const auto t = csv::parse(text, name);
  if (t.header.size() < 7 || (t.header.size() - 7) % 2 != 0)
    throw DataError(name + ": unexpected sweep curve header");
  const std::size_t folds = (t.header.size() - 7) / 2;
  SweepCurve curve;
  curve.name = std::move(name);
  for (const auto& row : t.rows) {
    SweepPoint p;
    p.component_count = static_cast<int>(csv::parse_int(row[0], curve.name));
    MeanSd* slots[] = {&p.accuracy, &p.recall, &p.specificity};
    for (int m = 0; m < 3; ++m) {
      slots[m]->mean = csv::parse_double(row[static_cast<std::size_t>(1 + 2 * m)], curve.name);
      slots[m]->sd = csv::parse_double(row[static_cast<std::size_t>(2 + 2 * m)], curve.name);
    }
    for (std::size_t f = 0; f < folds; ++f) {
      FoldResult r;
      r.hyperparams.box_constraint = csv::parse_double(row[7 + 2 * f], curve.name);
      r.hyperparams.kernel_scale = csv::parse_double(row[8 + 2 * f], curve.name);
      p.folds.push_back(r);
    }
    curve.points.push_back(std::move(p));
  }
  return curve;
}

}  // namespace cmc
