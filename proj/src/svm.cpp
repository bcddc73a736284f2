#include "cmc/svm.hpp"

#include <algorithm>
#include <limits>

#include "cmc/csv.hpp"

namespace cmc {

Eigen::MatrixXd rbf_gram(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double scale) {
  if (a.cols() != b.cols()) throw DimensionError("rbf_gram: feature count mismatch");
  if (!(scale > 0)) throw DataError("rbf_gram: kernel scale must be positive");
  const double inv = 1.0 / (scale * scale);
  Eigen::MatrixXd k(a.rows(), b.rows());
  for (Eigen::Index j = 0; j < b.rows(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i) k(i, j) = std::exp(-(a.row(i) - b.row(j)).squaredNorm() * inv);
  return k;
}

namespace {

constexpr double kTau = 1e-12;

bool in_up(double y, double a, double c) { return (y > 0 && a < c) || (y < 0 && a > 0); }
bool in_low(double y, double a, double c) { return (y > 0 && a > 0) || (y < 0 && a < c); }

}  // namespace

SmoSolution solve_smo(const Eigen::MatrixXd& kernel, const Eigen::VectorXd& labels, double box_constraint,
                      const SmoSettings& settings) {
  const Eigen::Index n = kernel.rows();
  const double c = box_constraint;
  const Eigen::MatrixXd q = (labels * labels.transpose()).cwiseProduct(kernel);
  const Eigen::VectorXd& y = labels;

  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd grad = Eigen::VectorXd::Constant(n, -1.0);

  const long max_iter = settings.max_passes * std::max<long>(1, static_cast<long>(n));
  long iter = 0;
  double gap = std::numeric_limits<double>::infinity();
  bool converged = false;
  while (iter < max_iter) {
    // i maximizes -y G over I_up, j minimizes it over I_low.
    Eigen::Index i = -1, j = -1;
    double g_max = -std::numeric_limits<double>::infinity();
    double g_min = std::numeric_limits<double>::infinity();
    for (Eigen::Index t = 0; t < n; ++t) {
      const double v = -y(t) * grad(t);
      if (in_up(y(t), alpha(t), c) && v > g_max) {
        g_max = v;
        i = t;
      }
      if (in_low(y(t), alpha(t), c) && v < g_min) {
        g_min = v;
        j = t;
      }
    }
    gap = g_max - g_min;
    if (i < 0 || j < 0 || gap < settings.stop_tol) {
      converged = true;
      break;
    }
    ++iter;

    const double old_ai = alpha(i), old_aj = alpha(j);
    if (y(i) != y(j)) {
      double quad = q(i, i) + q(j, j) + 2.0 * q(i, j);
      if (quad <= 0) quad = kTau;
      const double delta = (-grad(i) - grad(j)) / quad;
      const double diff = alpha(i) - alpha(j);
      alpha(i) += delta;
      alpha(j) += delta;
      if (diff > 0) {
        if (alpha(j) < 0) {
          alpha(j) = 0;
          alpha(i) = diff;
        }
      } else if (alpha(i) < 0) {
        alpha(i) = 0;
        alpha(j) = -diff;
      }
      if (diff > 0) {
        if (alpha(i) > c) {
          alpha(i) = c;
          alpha(j) = c - diff;
        }
      } else if (alpha(j) > c) {
        alpha(j) = c;
        alpha(i) = c + diff;
      }
    } else {
      double quad = q(i, i) + q(j, j) - 2.0 * q(i, j);
      if (quad <= 0) quad = kTau;
      const double delta = (grad(i) - grad(j)) / quad;
      const double sum = alpha(i) + alpha(j);
      alpha(i) -= delta;
      alpha(j) += delta;
      if (sum > c) {
        if (alpha(i) > c) {
          alpha(i) = c;
          alpha(j) = sum - c;
        }
      } else if (alpha(j) < 0) {
        alpha(j) = 0;
        alpha(i) = sum;
      }
      if (sum > c) {
        if (alpha(j) > c) {
          alpha(j) = c;
          alpha(i) = sum - c;
        }
      } else if (alpha(i) < 0) {
        alpha(i) = 0;
        alpha(j) = sum;
      }
    }
    const double d_i = alpha(i) - old_ai, d_j = alpha(j) - old_aj;
    grad += q.col(i) * d_i + q.col(j) * d_j;
  }

  // Bias: average over free vectors, else the midpoint of the feasible interval.
  double free_sum = 0.0;
  long n_free = 0;
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
  for (Eigen::Index t = 0; t < n; ++t) {
    const double v = -y(t) * grad(t);
    if (alpha(t) > 0 && alpha(t) < c) {
      free_sum += v;
      ++n_free;
    } else if ((alpha(t) == 0 && y(t) > 0) || (alpha(t) == c && y(t) < 0)) {
      lower = std::max(lower, v);
    } else {
      upper = std::min(upper, v);
    }
  }
  double bias;
  if (n_free > 0) bias = free_sum / static_cast<double>(n_free);
  else if (std::isfinite(lower) && std::isfinite(upper)) bias = 0.5 * (lower + upper);
  else bias = std::isfinite(lower) ? lower : upper;

  SmoSolution sol;
  sol.alpha = std::move(alpha);
  sol.bias = bias;
  sol.dual_objective = 0.5 * sol.alpha.dot(grad - Eigen::VectorXd::Ones(n));
  sol.iterations = iter;
  sol.converged = converged;
  sol.final_gap = gap;
  return sol;
}

SvmModel train_svm(const Eigen::MatrixXd& features, const Eigen::VectorXd& labels, const SvmHyperparams& hp,
                   const SmoSettings& settings) {
  const Eigen::Index n = features.rows();
  if (labels.size() != n) throw DimensionError("train_svm: label count does not match row count");
  if (!(hp.box_constraint > 0) || !(hp.kernel_scale > 0))
    throw DataError("train_svm: box constraint and kernel scale must be positive");
  if (!features.allFinite()) throw DataError("train_svm: non-finite feature");
  bool has_pos = false, has_neg = false;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (labels(i) == 1.0) has_pos = true;
    else if (labels(i) == -1.0) has_neg = true;
    else throw DataError("train_svm: labels must be +1 or -1");
  }
  if (!has_pos || !has_neg) throw DataError("train_svm: training set contains a single class");

  auto sol = solve_smo(rbf_gram(features, features, hp.kernel_scale), labels, hp.box_constraint, settings);

  SvmModel model;
  model.hyperparams = hp;
  model.n_features = features.cols();
  model.bias = sol.bias;
  model.dual_objective = sol.dual_objective;
  model.iterations = sol.iterations;
  model.converged = sol.converged;
  model.final_gap = sol.final_gap;

  Eigen::Index kept = 0;
  for (Eigen::Index t = 0; t < n; ++t)
    if (sol.alpha(t) > settings.alpha_eps) ++kept;
  model.support_vectors.resize(kept, features.cols());
  model.dual_coef.resize(kept);
  Eigen::Index r = 0;
  for (Eigen::Index t = 0; t < n; ++t)
    if (sol.alpha(t) > settings.alpha_eps) {
      model.support_vectors.row(r) = features.row(t);
      model.dual_coef(r) = sol.alpha(t) * labels(t);
      ++r;
    }
  model.alpha = std::move(sol.alpha);
  return model;
}

Eigen::VectorXd decision_values(const SvmModel& model, const Eigen::MatrixXd& rows) {
  if (rows.cols() != model.n_features)
    throw DimensionError("svm: expected " + std::to_string(model.n_features) + " features, got " +
                         std::to_string(rows.cols()));
  if (model.support_vectors.rows() == 0) return Eigen::VectorXd::Constant(rows.rows(), model.bias);
  return (rbf_gram(rows, model.support_vectors, model.hyperparams.kernel_scale) * model.dual_coef).array() +
         model.bias;
}

Eigen::VectorXd predict(const SvmModel& model, const Eigen::MatrixXd& rows) {
  return decision_values(model, rows).unaryExpr([](double f) { return f > 0.0 ? 1.0 : -1.0; });
}

std::string svm_csv(const SvmModel& model) {
  std::string out = "kind,index,value";
  for (Eigen::Index j = 0; j < model.n_features; ++j) out += ",x" + std::to_string(j + 1);
  out += "\nbias,0," + csv::format_double(model.bias);
  for (Eigen::Index j = 0; j < model.n_features; ++j) out += ",";
  out += "\n";
  for (Eigen::Index r = 0; r < model.support_vectors.rows(); ++r) {
    out += "sv," + std::to_string(r) + "," + csv::format_double(model.dual_coef(r));
    for (Eigen::Index j = 0; j < model.n_features; ++j) out += "," + csv::format_double(model.support_vectors(r, j));
    out += "\n";
  }
  return out;
}

}  // namespace cmc
