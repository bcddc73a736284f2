#include <doctest.h>

#include "cmc/gp.hpp"
#include "cmc/rng.hpp"

using namespace cmc;

TEST_CASE("matern 5/2 at zero and its monotone decay") {
  CHECK(gp::matern52(0.0) == 1.0);
  double prev = 1.0;
  for (double r = 0.1; r < 5; r += 0.1) {
    const double v = gp::matern52(r);
    CHECK(v < prev);
    CHECK(v > 0.0);
    prev = v;
  }
  const double r = 1.3, s5 = std::sqrt(5.0);
  CHECK(gp::matern52(r) == doctest::Approx((1 + s5 * r + 5 * r * r / 3) * std::exp(-s5 * r)));
}

TEST_CASE("halton points: first radical inverses in bases 2 and 3") {
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(2);
  auto h = gp::halton(1, zero);
  CHECK(h(0) == doctest::Approx(0.5));
  CHECK(h(1) == doctest::Approx(1.0 / 3.0));
  h = gp::halton(3, zero);
  CHECK(h(0) == doctest::Approx(0.75));
  CHECK(h(1) == doctest::Approx(1.0 / 9.0));
  Eigen::VectorXd shift(2);
  shift << 0.7, 0.9;
  h = gp::halton(1, shift);
  CHECK(h(0) == doctest::Approx(0.2));
  CHECK(h(1) == doctest::Approx(1.0 / 3.0 + 0.9 - 1.0));
}

TEST_CASE("gp interpolates its data and reverts to the prior far away") {
  Rng rng(3);
  Eigen::MatrixXd x(10, 2);
  Eigen::VectorXd y(10);
  for (int i = 0; i < 10; ++i) {
    x(i, 0) = rng.uniform();
    x(i, 1) = rng.uniform();
    y(i) = std::sin(3 * x(i, 0)) + x(i, 1);
  }
  const auto fit = gp::fit(x, y, 1e-6, 42);
  const auto p = gp::predict(fit, x);
  CHECK((p.mean - y).cwiseAbs().maxCoeff() < 1e-2);
  CHECK(p.sd.maxCoeff() < 0.05 * (y.maxCoeff() - y.minCoeff()));
  Eigen::MatrixXd far(1, 2);
  far << 50, 50;
  const auto pf = gp::predict(fit, far);
  CHECK(pf.sd(0) > p.sd.maxCoeff());
  CHECK((fit.lengthscales.array() > 0).all());
}

TEST_CASE("expected improvement is non-negative and grows with uncertainty") {
  gp::Prediction p;
  p.mean = Eigen::VectorXd::Constant(3, 1.0);
  p.sd.resize(3);
  p.sd << 0.0, 0.1, 1.0;
  const auto ei = gp::expected_improvement(p, 0.5);
  CHECK(ei(0) == 0.0);
  CHECK(ei(1) >= 0.0);
  CHECK(ei(2) > ei(1));
  p.sd.setZero();
  p.mean << 0.2, 0.5, 0.9;
  const auto det = gp::expected_improvement(p, 0.5);
  CHECK(det(0) == doctest::Approx(0.3));
  CHECK(det(1) == 0.0);
  CHECK(det(2) == 0.0);
}

TEST_CASE("length-scale fit is deterministic") {
  Eigen::MatrixXd x(6, 2);
  x << 0, 0, 0.2, 0.1, 0.5, 0.9, 0.9, 0.3, 0.4, 0.4, 0.7, 0.6;
  Eigen::VectorXd y(6);
  y << 0.1, -0.3, 1.2, 0.4, 0.0, -0.8;
  CHECK(gp::fit_lengthscales(x, y, 1e-6, 9) == gp::fit_lengthscales(x, y, 1e-6, 9));
  CHECK(std::isfinite(gp::neg_log_likelihood(x, y, gp::fit_lengthscales(x, y, 1e-6, 9), 1e-6)));
}
