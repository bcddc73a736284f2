#include <doctest.h>

#include "cmc/pca.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace cmc;

namespace {

double max_sign_free_error(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  double worst = 0.0;
  for (Eigen::Index c = 0; c < a.cols(); ++c)
    worst = std::max(worst, std::min((a.col(c) - b.col(c)).cwiseAbs().maxCoeff(),
                                     (a.col(c) + b.col(c)).cwiseAbs().maxCoeff()));
  return worst;
}

}  // namespace

TEST_CASE("rank-1 data: PC1 is +e1 and carries all variance") {
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(5, 3);
  x.col(0) << -2, -1, 0, 1, 2;
  const auto m = fit_pca(x);
  CHECK(m.k_max() == 3);
  CHECK(m.components(0, 0) == doctest::Approx(1.0));
  CHECK(m.components.col(0).tail(2).cwiseAbs().maxCoeff() < 1e-12);
  const auto r = explained_variance_ratio(m);
  CHECK(r(0) == doctest::Approx(1.0));
  CHECK(r.tail(2).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("symmetric isotropic data has equal ratios") {
  Eigen::MatrixXd x(4, 2);
  x << 1, 0, -1, 0, 0, 1, 0, -1;
  const auto r = explained_variance_ratio(fit_pca(x));
  CHECK(r(0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(r(1) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("singular values {2,1} give ratios {0.8, 0.2}") {
  PcaModel<double> m;
  m.singular_values.resize(2);
  m.singular_values << 2, 1;
  const auto r = explained_variance_ratio(m);
  CHECK(r(0) == doctest::Approx(0.8));
  CHECK(r(1) == doctest::Approx(0.2));
}

TEST_CASE("4x3 components match the covariance eigen oracle up to sign") {
  Rng rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::MatrixXd x = testing_util::gaussian(4, 3, rng);
    const auto m = fit_pca(x);
    const auto eig = oracle::covariance_eigen(x);
    CHECK(max_sign_free_error(m.components, eig.vectors.leftCols(m.k_max())) < 1e-8);
    const Eigen::VectorXd var = m.singular_values.array().square() / 3.0;
    CHECK((var - eig.values.head(m.k_max())).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("sign convention: largest-magnitude loading positive, ties to lowest index") {
  Eigen::MatrixXd v(3, 2);
  v << 0.5, -0.6, -0.5, 0.6, 0.1, 0.0;
  canonicalize_signs(v);
  CHECK(v(0, 0) == 0.5);
  CHECK(v(0, 1) == 0.6);
}

TEST_CASE("projection: distances preserved, center maps to zero, dot-product oracle") {
  Rng rng(3);
  const Eigen::MatrixXd controls = testing_util::gaussian(22, 12, rng);
  const Eigen::MatrixXd cases = testing_util::gaussian(8, 12, rng);
  const auto m = fit_pca(controls);
  CHECK(m.k_max() == 12);
  const Eigen::MatrixXd s = project(m, controls, m.k_max());
  for (Eigen::Index i = 0; i < 22; ++i)
    for (Eigen::Index j = 0; j < 22; ++j)
      CHECK(std::abs((s.row(i) - s.row(j)).norm() - (controls.row(i) - controls.row(j)).norm()) < 1e-8);
  CHECK(project(m, Eigen::MatrixXd(m.center), 3).cwiseAbs().maxCoeff() == 0.0);
  const Eigen::MatrixXd sc = project(m, cases, 2);
  for (Eigen::Index i = 0; i < 8; ++i)
    for (Eigen::Index c = 0; c < 2; ++c) {
      double dot = 0;
      for (Eigen::Index j = 0; j < 12; ++j) dot += (cases(i, j) - m.center(j)) * m.components(j, c);
      CHECK(std::abs(sc(i, c) - dot) < 1e-12);
    }
  CHECK_THROWS_AS(project(m, cases, 0), DimensionError);
  CHECK_THROWS_AS(project(m, cases, 13), DimensionError);
  CHECK_THROWS_AS(project(m, Eigen::MatrixXd::Zero(2, 5), 1), DimensionError);
}

TEST_CASE("wide matrix: k_max = rows - 1, orthonormal, reconstruction, ordering, determinism") {
  Rng rng(4);
  const Eigen::MatrixXd x = testing_util::gaussian(22, 300, rng);
  const auto m = fit_pca(x);
  CHECK(m.k_max() == 21);
  const Eigen::MatrixXd gram = m.components.transpose() * m.components;
  CHECK((gram - Eigen::MatrixXd::Identity(21, 21)).cwiseAbs().maxCoeff() < 1e-8);
  const Eigen::MatrixXd centered = x.rowwise() - m.center;
  const Eigen::MatrixXd back = project(m, x, 21) * m.components.transpose();
  CHECK((back - centered).norm() / centered.norm() < 1e-6);
  const Eigen::MatrixXd s = project(m, x, 21);
  for (Eigen::Index c = 1; c < 21; ++c) CHECK(s.col(c).squaredNorm() <= s.col(c - 1).squaredNorm() * (1 + 1e-12));
  const auto again = fit_pca(x);
  CHECK(again.components == m.components);
  CHECK(again.singular_values == m.singular_values);
  CHECK(std::abs(explained_variance_ratio(m).sum() - 1.0) < 1e-12);
}

TEST_CASE("float instantiation works") {
  Rng rng(5);
  const Eigen::MatrixXf x = testing_util::gaussian(10, 4, rng).cast<float>();
  const auto m = fit_pca(x);
  const Eigen::MatrixXf gram = m.components.transpose() * m.components;
  CHECK((gram - Eigen::MatrixXf::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-5f);
}

TEST_CASE("fewer than two rows is an error") { CHECK_THROWS_AS(fit_pca(Eigen::MatrixXd::Ones(1, 3)), DataError); }
