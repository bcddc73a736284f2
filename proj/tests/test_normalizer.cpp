#include <doctest.h>

#include "cmc/error.hpp"
#include "cmc/normalizer.hpp"
#include "helpers.hpp"

using namespace cmc;

TEST_CASE("controls {1,2,3}: mu 2, sigma 1, value 3 maps to z 1") {
  Eigen::MatrixXd c(3, 1);
  c << 1, 2, 3;
  const auto st = fit_normalizer(c, {"m"});
  CHECK(st.mu(0) == doctest::Approx(2.0));
  CHECK(st.sigma(0) == doctest::Approx(1.0));
  Eigen::MatrixXd probe(2, 1);
  probe << 3, 2;
  const auto z = apply_normalizer(st, probe);
  CHECK(z(0, 0) == doctest::Approx(1.0));
  CHECK(z(1, 0) == 0.0);
}

TEST_CASE("constant column is excluded and dropped from the output") {
  Eigen::MatrixXd c(3, 3);
  c << 1, 5, 0, 2, 5, 1, 3, 5, 3;
  const auto st = fit_normalizer(c, {"a", "b", "c"});
  CHECK(st.excluded == std::vector<bool>{false, true, false});
  CHECK(st.n_retained() == 2);
  CHECK(st.retained() == std::vector<Eigen::Index>{0, 2});
  const auto z = apply_normalizer(st, c);
  CHECK(z.cols() == 2);
  CHECK(stats_csv(st).find("b,5,0,1") != std::string::npos);
}

TEST_CASE("errors: too few controls, all columns excluded, column mismatch") {
  CHECK_THROWS_AS(fit_normalizer(Eigen::MatrixXd::Ones(1, 2), {"a", "b"}), DataError);
  CHECK_THROWS_AS(fit_normalizer(Eigen::MatrixXd::Ones(3, 2), {"a", "b"}), DataError);
  MetricTable t{"x", {"a", "b"}, {"s1", "s2", "s3"}, Eigen::MatrixXd(3, 2)};
  t.values << 1, 2, 3, 4, 5, 7;
  const auto st = fit_normalizer(t, {"s1", "s2", "s3"});
  MetricTable other = t;
  other.columns = {"b", "a"};
  CHECK_THROWS_AS(apply_normalizer(st, other), DimensionError);
  CHECK_THROWS_AS(apply_normalizer(st, Eigen::MatrixXd::Ones(2, 3)), DimensionError);
}

TEST_CASE("control z-columns have mean 0 and sample sd 1") {
  cmc::Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::MatrixXd c = testing_util::gaussian(22, 30, rng) * 7.0;
    c.array() += 100.0;
    std::vector<std::string> names(30, "m");
    const auto z = apply_normalizer(fit_normalizer(c, names), c);
    for (Eigen::Index j = 0; j < z.cols(); ++j) {
      const double mean = z.col(j).mean();
      const double sd = std::sqrt((z.col(j).array() - mean).square().sum() / (z.rows() - 1));
      CHECK(std::abs(mean) < 1e-10);
      CHECK(std::abs(sd - 1.0) < 1e-10);
    }
  }
}

TEST_CASE("affine invariance of z-scores") {
  cmc::Rng rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::MatrixXd x = testing_util::gaussian(30, 5, rng);
    const double a = std::exp(rng.uniform(-3, 3)), b = rng.uniform(-50, 50);
    const Eigen::MatrixXd y = (a * x.array() + b).matrix();
    std::vector<std::string> names(5, "m");
    const auto zx = apply_normalizer(fit_normalizer(x.topRows(22), names), x);
    const auto zy = apply_normalizer(fit_normalizer(y.topRows(22), names), y);
    CHECK((zx - zy).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("case rows never influence stats") {
  MetricTable t{"x", {"a", "b"}, {"c1", "c2", "c3", "m1"}, Eigen::MatrixXd(4, 2)};
  t.values << 1, 2, 3, 4, 5, 7, 9, 9;
  const std::set<std::string> controls{"c1", "c2", "c3"};
  const auto before = fit_normalizer(t, controls);
  t.values.row(3) << -1e6, 1e6;
  const auto after = fit_normalizer(t, controls);
  CHECK(before.mu == after.mu);
  CHECK(before.sigma == after.sigma);
}
