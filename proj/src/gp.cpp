#include "cmc/gp.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "cmc/error.hpp"
#include "cmc/rng.hpp"

namespace cmc::gp {

double matern52(double r) {
  const double a = std::sqrt(5.0) * r;
  return (1.0 + a + a * a / 3.0) * std::exp(-a);
}

namespace {

Eigen::MatrixXd cross_kernel(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const Eigen::VectorXd& ls) {
  Eigen::MatrixXd k(a.rows(), b.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < b.rows(); ++j)
      k(i, j) = matern52(((a.row(i) - b.row(j)).transpose().array() / ls.array()).matrix().norm());
  return k;
}

constexpr double kMinLogScale = -3.0;  // ln(0.05)
constexpr double kMaxLogScale = 3.0;   // ln(20)

}  // namespace

double neg_log_likelihood(const Eigen::MatrixXd& x, const Eigen::VectorXd& y_std, const Eigen::VectorXd& lengthscales,
                          double jitter) {
  const auto n = x.rows();
  Eigen::MatrixXd k = cross_kernel(x, x, lengthscales);
  k.diagonal().array() += jitter;
  Eigen::LLT<Eigen::MatrixXd> llt(k);
  if (llt.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
  const double quad = y_std.dot(llt.solve(y_std));
  const double log_det = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  const double var = std::max(quad / static_cast<double>(n), 1e-300);
  const double nll = 0.5 * static_cast<double>(n) * std::log(var) + 0.5 * log_det;
  return std::isfinite(nll) ? nll : std::numeric_limits<double>::infinity();
}

Eigen::VectorXd fit_lengthscales(const Eigen::MatrixXd& x, const Eigen::VectorXd& y_std, double jitter,
                                 std::uint64_t seed, int starts) {
  const auto d = x.cols();
  Rng rng(seed, {hash_label("gp-lengthscale")});
  Eigen::VectorXd best_log = Eigen::VectorXd::Zero(d);
  double best = std::numeric_limits<double>::infinity();
  auto eval = [&](const Eigen::VectorXd& log_ls) {
    return neg_log_likelihood(x, y_std, log_ls.array().exp().matrix(), jitter);
  };
  for (int s = 0; s < starts; ++s) {
    Eigen::VectorXd cur(d);
    for (Eigen::Index j = 0; j < d; ++j) cur(j) = rng.uniform(kMinLogScale, kMaxLogScale);
    double cur_val = eval(cur);
    double step = 1.0;
    for (int it = 0; it < 200 && step > 1e-3; ++it) {
      bool improved = false;
      for (Eigen::Index j = 0; j < d; ++j) {
        for (double dir : {1.0, -1.0}) {
          Eigen::VectorXd cand = cur;
          cand(j) = std::clamp(cand(j) + dir * step, kMinLogScale, kMaxLogScale);
          const double v = eval(cand);
          if (v < cur_val) {
            cur = cand;
            cur_val = v;
            improved = true;
            break;
          }
        }
      }
      if (!improved) step *= 0.5;
    }
    if (cur_val < best) {
      best = cur_val;
      best_log = cur;
    }
  }
  if (!std::isfinite(best)) return Eigen::VectorXd::Ones(d);
  return best_log.array().exp();
}

GpFit fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double jitter, std::uint64_t seed) {
  if (x.rows() != y.size() || x.rows() == 0) throw DimensionError("gp: inputs and targets do not match");
  GpFit g;
  g.x = x;
  g.jitter = jitter;
  g.y_mean = y.mean();
  const double sd = std::sqrt((y.array() - g.y_mean).square().sum() / static_cast<double>(y.size()));
  g.y_scale = sd > 0 ? sd : 1.0;
  const Eigen::VectorXd y_std = (y.array() - g.y_mean) / g.y_scale;

  g.lengthscales = fit_lengthscales(x, y_std, jitter, seed);
  Eigen::MatrixXd k = cross_kernel(x, x, g.lengthscales);
  k.diagonal().array() += jitter;
  g.chol.compute(k);
  if (g.chol.info() != Eigen::Success) {
    g.lengthscales = Eigen::VectorXd::Ones(x.cols());
    k = cross_kernel(x, x, g.lengthscales);
    k.diagonal().array() += jitter;
    g.chol.compute(k);
  }
  g.weights = g.chol.solve(y_std);
  g.signal_var = std::max(y_std.dot(g.weights) / static_cast<double>(y.size()), 1e-12);
  return g;
}

Prediction predict(const GpFit& gp, const Eigen::MatrixXd& xs) {
  const Eigen::MatrixXd ks = cross_kernel(xs, gp.x, gp.lengthscales);  // m x n
  Prediction p;
  p.mean = (ks * gp.weights).array() * gp.y_scale + gp.y_mean;
  const Eigen::MatrixXd v = gp.chol.matrixL().solve(ks.transpose());
  p.sd.resize(xs.rows());
  for (Eigen::Index i = 0; i < xs.rows(); ++i) {
    const double var = gp.signal_var * std::max(1.0 - v.col(i).squaredNorm(), 0.0);
    p.sd(i) = std::sqrt(var) * gp.y_scale;
  }
  return p;
}

Eigen::VectorXd expected_improvement(const Prediction& p, double best) {
  Eigen::VectorXd ei(p.mean.size());
  for (Eigen::Index i = 0; i < ei.size(); ++i) {
    const double imp = best - p.mean(i);
    const double s = p.sd(i);
    if (!(s > 0)) {
      ei(i) = std::max(imp, 0.0);
      continue;
    }
    const double z = imp / s;
    const double cdf = 0.5 * std::erfc(-z / std::numbers::sqrt2);
    const double pdf = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
    ei(i) = imp * cdf + s * pdf;
  }
  return ei;
}

Eigen::VectorXd halton(std::uint64_t index, const Eigen::VectorXd& shift) {
  static constexpr std::array<std::uint64_t, 8> kPrimes = {2, 3, 5, 7, 11, 13, 17, 19};
  if (shift.size() > static_cast<Eigen::Index>(kPrimes.size())) throw DimensionError("halton: too many dimensions");
  Eigen::VectorXd out(shift.size());
  for (Eigen::Index d = 0; d < shift.size(); ++d) {
    const auto base = kPrimes[static_cast<std::size_t>(d)];
    double f = 1.0, r = 0.0;
    for (auto i = index; i > 0; i /= base) {
      f /= static_cast<double>(base);
      r += f * static_cast<double>(i % base);
    }
    out(d) = std::fmod(r + shift(d), 1.0);
  }
  return out;
}

}  // namespace cmc::gp
