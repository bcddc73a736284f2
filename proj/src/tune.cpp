#include "cmc/tune.hpp"

#include <cmath>
#include <set>

#include "cmc/csv.hpp"
#include "cmc/cv.hpp"
#include "cmc/error.hpp"
#include "cmc/gp.hpp"
#include "cmc/rng.hpp"

namespace cmc {

std::string_view tuner_label(TunerKind t) { return t == TunerKind::bayes ? "bayes" : "grid"; }

TunerKind parse_tuner(std::string_view s) {
  if (s == "bayes") return TunerKind::bayes;
  if (s == "grid") return TunerKind::grid;
  throw DataError("unknown tuner '" + std::string(s) + "' (expected bayes or grid)");
}

void TuneConfig::validate() const {
  if (budget < 1) throw DataError("tune: budget must be at least 1");
  if (!(log10_c_low < log10_c_high) || !(log10_s_low < log10_s_high) || !std::isfinite(log10_c_low) ||
      !std::isfinite(log10_c_high) || !std::isfinite(log10_s_low) || !std::isfinite(log10_s_high))
    throw DataError("tune: search ranges must be finite with low < high");
  if (inner_folds < 2) throw DataError("tune: inner_folds must be at least 2");
  if (grid_points < 1) throw DataError("tune: grid_points must be at least 1");
}

namespace {

Eigen::MatrixXd squared_distances(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd d(a.rows(), b.rows());
  for (Eigen::Index j = 0; j < b.rows(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i) d(i, j) = (a.row(i) - b.row(j)).squaredNorm();
  return d;
}

}  // namespace

InnerCv::InnerCv(const Eigen::MatrixXd& features, const Eigen::VectorXd& labels, const TuneConfig& cfg)
    : smo_(cfg.smo) {
  if (features.rows() != labels.size()) throw DimensionError("tune: label count does not match row count");
  const auto n_pos = (labels.array() > 0).count();
  const auto n_neg = labels.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) throw DataError("tune: training data contains a single class");
  const int k = static_cast<int>(std::max<Eigen::Index>(2, std::min<Eigen::Index>({cfg.inner_folds, n_pos, n_neg})));
  const auto plan = stratified_folds(labels, k, stream_seed(cfg.seed, {hash_label("inner-cv")}));
  for (int f = 0; f < k; ++f) {
    const auto tr = plan.training_rows(f);
    const auto va = plan.validation_rows(f);
    if (va.empty()) continue;
    Fold fold;
    const Eigen::MatrixXd xt = features(tr, Eigen::all);
    const Eigen::MatrixXd xv = features(va, Eigen::all);
    fold.train_sq = squared_distances(xt, xt);
    fold.val_sq = squared_distances(xv, xt);
    fold.train_labels = labels(tr);
    fold.val_labels = labels(va);
    const auto tp = (fold.train_labels.array() > 0).count();
    fold.single_class = tp == 0 || tp == fold.train_labels.size();
    folds_.push_back(std::move(fold));
  }
}

double InnerCv::loss(const SvmHyperparams& hp) const {
  const double inv = 1.0 / (hp.kernel_scale * hp.kernel_scale);
  double total = 0.0;
  for (const auto& f : folds_) {
    Eigen::VectorXd pred;
    if (f.single_class) {
      pred = Eigen::VectorXd::Constant(f.val_labels.size(), f.train_labels(0));
    } else {
      const Eigen::MatrixXd k = (-f.train_sq * inv).array().exp();
      const auto sol = solve_smo(k, f.train_labels, hp.box_constraint, smo_);
      const Eigen::MatrixXd kv = (-f.val_sq * inv).array().exp();
      const Eigen::VectorXd dec = (kv * sol.alpha.cwiseProduct(f.train_labels)).array() + sol.bias;
      pred = dec.unaryExpr([](double v) { return v > 0.0 ? 1.0 : -1.0; });
    }
    const auto wrong = (pred.array() != f.val_labels.array()).count();
    total += static_cast<double>(wrong) / static_cast<double>(f.val_labels.size());
  }
  return total / static_cast<double>(folds_.size());
}

double inner_cv_loss(const Eigen::MatrixXd& features, const Eigen::VectorXd& labels, const SvmHyperparams& hp,
                     const TuneConfig& cfg) {
  cfg.validate();
  return InnerCv(features, labels, cfg).loss(hp);
}

namespace {

class Recorder {
 public:
  Recorder(const InnerCv& cv, TuneTrace& trace) : cv_(cv), trace_(trace) {}

  double operator()(double log_c, double log_s) {
    const double loss = cv_.loss({std::pow(10.0, log_c), std::pow(10.0, log_s)});
    TuneEval e{log_c, log_s, loss, loss};
    if (!trace_.evals.empty()) {
      const double prev = trace_.evals.back().best_so_far;
      if (loss < prev) trace_.best_index = trace_.evals.size();
      e.best_so_far = std::min(prev, loss);
    }
    trace_.evals.push_back(e);
    return loss;
  }

 private:
  const InnerCv& cv_;
  TuneTrace& trace_;
};

void run_grid(const TuneConfig& cfg, Recorder& record) {
  const int g = cfg.grid_points;
  auto at = [g](double lo, double hi, int i) { return g == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * i / (g - 1); };
  for (int i = 0; i < g; ++i)
    for (int j = 0; j < g; ++j) record(at(cfg.log10_c_low, cfg.log10_c_high, i), at(cfg.log10_s_low, cfg.log10_s_high, j));
}

void run_bayes(const TuneConfig& cfg, Recorder& record, TuneTrace& trace) {
  const Eigen::Vector2d lo(cfg.log10_c_low, cfg.log10_s_low);
  const Eigen::Vector2d span(cfg.log10_c_high - cfg.log10_c_low, cfg.log10_s_high - cfg.log10_s_low);
  auto to_box = [&](const Eigen::VectorXd& u) -> Eigen::Vector2d { return lo + span.cwiseProduct(u); };

  Rng rng(cfg.seed, {hash_label("bayes-shift")});
  Eigen::VectorXd init_shift(2), pool_shift(2);
  init_shift << rng.uniform(), rng.uniform();
  pool_shift << rng.uniform(), rng.uniform();

  const int n_init = std::min(cfg.budget, cfg.initial_points);
  Eigen::MatrixXd x(cfg.budget, 2);
  Eigen::VectorXd y(cfg.budget);
  int n = 0;
  for (; n < n_init; ++n) {
    const Eigen::Vector2d p = to_box(gp::halton(static_cast<std::uint64_t>(n + 1), init_shift));
    x.row(n) = p.transpose();
    y(n) = record(p(0), p(1));
  }

  Eigen::MatrixXd pool(cfg.pool_size, 2);
  for (int i = 0; i < cfg.pool_size; ++i)
    pool.row(i) = to_box(gp::halton(static_cast<std::uint64_t>(i + 1), pool_shift)).transpose();
  std::vector<bool> used(static_cast<std::size_t>(cfg.pool_size), false);

  for (; n < cfg.budget; ++n) {
    const auto fit = gp::fit(x.topRows(n), y.head(n), cfg.gp_jitter,
                             stream_seed(cfg.seed, {hash_label("gp"), static_cast<std::uint64_t>(n)}));
    const auto pred = gp::predict(fit, pool);
    const auto ei = gp::expected_improvement(pred, trace.evals[trace.best_index].loss);
    Eigen::Index pick = -1;
    double best_ei = 0.0;
    for (Eigen::Index i = 0; i < pool.rows(); ++i) {
      if (used[static_cast<std::size_t>(i)]) continue;
      if (ei(i) > best_ei) {
        best_ei = ei(i);
        pick = i;
      }
    }
    if (pick < 0) {
      // Flat surrogate: explore where it is least certain.
      double best_sd = -1.0;
      for (Eigen::Index i = 0; i < pool.rows(); ++i)
        if (!used[static_cast<std::size_t>(i)] && pred.sd(i) > best_sd) {
          best_sd = pred.sd(i);
          pick = i;
        }
    }
    if (pick < 0) break;  // pool exhausted
    used[static_cast<std::size_t>(pick)] = true;
    x.row(n) = pool.row(pick);
    y(n) = record(pool(pick, 0), pool(pick, 1));
  }
}

}  // namespace

TuneResult optimize_hyperparams(const Eigen::MatrixXd& features, const Eigen::VectorXd& labels,
                                const TuneConfig& cfg) {
  cfg.validate();
  const InnerCv cv(features, labels, cfg);
  TuneResult result;
  Recorder record(cv, result.trace);
  if (cfg.tuner == TunerKind::grid) run_grid(cfg, record);
  else run_bayes(cfg, record, result.trace);
  const auto& best = result.trace.evals[result.trace.best_index];
  result.best = {std::pow(10.0, best.log10_c), std::pow(10.0, best.log10_s)};
  return result;
}

std::string trace_csv(const TuneTrace& trace) {
  std::string out = "eval_index,log10_C,log10_s,loss,best_so_far\n";
  for (std::size_t i = 0; i < trace.evals.size(); ++i) {
    const auto& e = trace.evals[i];
    out += std::to_string(i) + "," + csv::format_double(e.log10_c) + "," + csv::format_double(e.log10_s) + "," +
           csv::format_double(e.loss) + "," + csv::format_double(e.best_so_far) + "\n";
  }
  return out;
}

}  // namespace cmc
