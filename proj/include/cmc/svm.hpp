#pragma once

// Soft-margin binary SVM with a Gaussian kernel, trained by SMO with the
// maximal-violating-pair working set. Labels are +1 (case) / -1 (control).

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "cmc/error.hpp"

namespace cmc {

struct SvmHyperparams {
  double box_constraint = 1.0;  // C
  double kernel_scale = 1.0;    // s

  bool operator==(const SvmHyperparams&) const = default;
};

// K(x, z) = exp(-|x - z|^2 / s^2)
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar rbf_kernel(const Eigen::MatrixBase<DerivedA>& x, const Eigen::MatrixBase<DerivedB>& z,
                                     typename DerivedA::Scalar scale) {
  if (x.size() != z.size()) throw DimensionError("rbf_kernel: length mismatch");
  if (!(scale > 0)) throw DataError("rbf_kernel: kernel scale must be positive");
  using std::exp;
  return exp(-(x - z).squaredNorm() / (scale * scale));
}

// Gram matrix between the rows of a and the rows of b.
Eigen::MatrixXd rbf_gram(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double scale);

struct SmoSettings {
  double kkt_tol = 1e-3;      // acceptance tolerance on the KKT conditions
  double stop_tol = 1e-6;     // stop when the maximal violation gap falls below this
  double alpha_eps = 1e-8;    // duals at or below this are not stored
  long max_passes = 100000;   // iteration cap is max_passes * n
};

struct SvmModel {
  Eigen::MatrixXd support_vectors;  // one row per stored support vector
  Eigen::VectorXd dual_coef;        // alpha_i * y_i
  double bias = 0.0;
  SvmHyperparams hyperparams;
  Eigen::Index n_features = 0;

  // Full training-set duals (alpha_i >= 0), kept for diagnostics.
  Eigen::VectorXd alpha;
  double dual_objective = 0.0;  // 1/2 a'Qa - sum(a), minimized
  long iterations = 0;
  bool converged = true;
  double final_gap = 0.0;
};

struct SmoSolution {
  Eigen::VectorXd alpha;  // 0 <= alpha_i <= C
  double bias = 0.0;
  double dual_objective = 0.0;  // 1/2 a'Qa - sum(a), minimized
  long iterations = 0;
  bool converged = true;
  double final_gap = 0.0;
};

// SMO on a precomputed kernel matrix. Does not validate labels.
SmoSolution solve_smo(const Eigen::MatrixXd& kernel, const Eigen::VectorXd& labels, double box_constraint,
                      const SmoSettings& settings = {});

SvmModel train_svm(const Eigen::MatrixXd& features, const Eigen::VectorXd& labels, const SvmHyperparams& hp,
                   const SmoSettings& settings = {});

// f(x) = sum_i alpha_i y_i K(x_i, x) + b
Eigen::VectorXd decision_values(const SvmModel& model, const Eigen::MatrixXd& rows);
// +1 when f > 0, otherwise -1 (ties go to the control class).
Eigen::VectorXd predict(const SvmModel& model, const Eigen::MatrixXd& rows);

// `kind,index,value,...`: one bias row then one row per support vector with
// its dual coefficient followed by its features.
std::string svm_csv(const SvmModel& model);

}  // namespace cmc
