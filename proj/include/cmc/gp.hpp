#pragma once

// Gaussian-process surrogate used by the Bayesian hyperparameter search.
// Matern-5/2 kernel with one length scale per input dimension, profiled signal
// variance and a fixed diagonal jitter.

#include <Eigen/Dense>
#include <cstdint>

namespace cmc::gp {

double matern52(double r);

struct GpFit {
  Eigen::MatrixXd x;              // training inputs, one row per point
  Eigen::VectorXd lengthscales;   // per dimension
  double y_mean = 0.0;
  double y_scale = 1.0;
  double signal_var = 1.0;        // on the standardized scale
  double jitter = 1e-6;
  Eigen::LLT<Eigen::MatrixXd> chol;
  Eigen::VectorXd weights;        // K^{-1} (y - mean) / scale
};

// Negative log marginal likelihood of standardized targets with the signal
// variance profiled out. +inf when the kernel matrix is not positive definite.
double neg_log_likelihood(const Eigen::MatrixXd& x, const Eigen::VectorXd& y_std, const Eigen::VectorXd& lengthscales,
                          double jitter);

// Multi-start coordinate search over log length scales. Falls back to 1.0 in
// every dimension if no start produces a finite likelihood.
Eigen::VectorXd fit_lengthscales(const Eigen::MatrixXd& x, const Eigen::VectorXd& y_std, double jitter,
                                 std::uint64_t seed, int starts = 16);

GpFit fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double jitter, std::uint64_t seed);

struct Prediction {
  Eigen::VectorXd mean;  // original target scale
  Eigen::VectorXd sd;
};

Prediction predict(const GpFit& gp, const Eigen::MatrixXd& xs);

// Expected improvement below `best` for a minimization problem.
Eigen::VectorXd expected_improvement(const Prediction& p, double best);

// Radical-inverse Halton point `index` (1-based) in `dims` dimensions, rotated
// by `shift` modulo 1.
Eigen::VectorXd halton(std::uint64_t index, const Eigen::VectorXd& shift);

}  // namespace cmc::gp
