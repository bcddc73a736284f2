#include <doctest.h>

#include "cmc/svm.hpp"
#include "helpers.hpp"
#include "oracles.hpp"
#include "svm_cases.hpp"

using namespace cmc;

TEST_CASE("rbf kernel: self-similarity, unit scaled distance, symmetry, errors") {
  Rng rng(1);
  for (int i = 0; i < 100; ++i) {
    const Eigen::VectorXd x = testing_util::gaussian(4, 1, rng), z = testing_util::gaussian(4, 1, rng);
    const double s = std::exp(rng.uniform(-2, 2));
    CHECK(rbf_kernel(x, x, s) == 1.0);
    CHECK(std::abs(rbf_kernel(x, z, s) - rbf_kernel(z, x, s)) <= 1e-15);
  }
  Eigen::VectorXd a(1), b(1);
  a << 0.0;
  b << 2.5;
  CHECK(rbf_kernel(a, b, 2.5) == doctest::Approx(std::exp(-1.0)));
  CHECK(rbf_kernel(a, b, 2.5) == doctest::Approx(0.3679).epsilon(1e-4));
  CHECK_THROWS_AS(rbf_kernel(a, Eigen::VectorXd::Zero(2).eval(), 1.0), DimensionError);
  CHECK_THROWS_AS(rbf_kernel(a, b, 0.0), DataError);
}

TEST_CASE("two mirrored points: zero bias, f(0) = 0 predicted as control") {
  Eigen::MatrixXd x(2, 1);
  x << -1, 1;
  Eigen::VectorXd y(2);
  y << -1, 1;
  for (double c : {0.01, 1.0, 100.0}) {
    const auto m = train_svm(x, y, {c, 1.0});
    CHECK(std::abs(m.bias) < 1e-12);
    CHECK(predict(m, x) == y);
    Eigen::MatrixXd origin = Eigen::MatrixXd::Zero(1, 1);
    CHECK(std::abs(decision_values(m, origin)(0)) < 1e-12);
    CHECK(predict(m, origin)(0) == -1.0);
  }
}

TEST_CASE("XOR-4 with s = 1, C = 10 matches the dual-QP oracle") {
  Eigen::MatrixXd x(4, 2);
  x << 1, 1, -1, -1, 1, -1, -1, 1;
  Eigen::VectorXd y(4);
  y << 1, 1, -1, -1;
  const auto m = train_svm(x, y, {10.0, 1.0});
  CHECK(predict(m, x) == y);
  const auto ref = oracle::solve_dual_qp(x, y, 10.0, 1.0);
  CHECK(std::abs(m.dual_objective - ref.objective) < 1e-4);
  CHECK(m.converged);
}

TEST_CASE("duplicating every row leaves probe predictions unchanged (separable, hard margin)") {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::MatrixXd x(8, 2);
    Eigen::VectorXd y(8);
    for (int i = 0; i < 8; ++i) {
      y(i) = i < 4 ? 1.0 : -1.0;
      x(i, 0) = rng.uniform(-1, 1) + 2.0 * y(i);
      x(i, 1) = rng.uniform(-1, 1);
    }
    const SvmHyperparams hp{1e3, 1.0};
    const auto once = train_svm(x, y, hp);
    CHECK(predict(once, x) == y);  // separable data, large C
    Eigen::MatrixXd x2(16, 2);
    Eigen::VectorXd y2(16);
    x2 << x, x;
    y2 << y, y;
    const auto twice = train_svm(x2, y2, hp);
    const Eigen::MatrixXd probes = svm_cases::probe_grid();
    CHECK(predict(once, probes) == predict(twice, probes));
  }
}

TEST_CASE("free support vectors sit on the margin; predictions equal the brute-force expansion") {
  Rng rng(8);
  for (int trial = 0; trial < 30; ++trial) {
    const Eigen::MatrixXd x = testing_util::gaussian(20, 3, rng);
    Eigen::VectorXd y(20);
    for (int i = 0; i < 20; ++i) y(i) = x(i, 0) + 0.5 * rng.normal() > 0 ? 1.0 : -1.0;
    y(0) = 1;
    y(1) = -1;
    const SvmHyperparams hp{std::pow(10.0, rng.uniform(-1, 2)), std::pow(10.0, rng.uniform(-0.5, 1))};
    const auto m = train_svm(x, y, hp);
    const Eigen::VectorXd f = decision_values(m, x);
    for (int i = 0; i < 20; ++i) {
      const double a = m.alpha(i);
      if (a > 1e-6 && a < hp.box_constraint - 1e-6) CHECK(std::abs(y(i) * f(i) - 1.0) <= 1e-3);
      CHECK(a >= 0.0);
      CHECK(a <= hp.box_constraint);
    }
    CHECK(std::abs(m.alpha.dot(y)) <= 1e-8);

    const Eigen::MatrixXd probes = testing_util::gaussian(25, 3, rng);
    const Eigen::VectorXd pred = predict(m, probes);
    for (Eigen::Index p = 0; p < probes.rows(); ++p) {
      double sum = m.bias;
      for (Eigen::Index i = 0; i < x.rows(); ++i) {
        if (m.alpha(i) <= 1e-8) continue;
        double d2 = 0;
        for (int c = 0; c < 3; ++c) d2 += (x(i, c) - probes(p, c)) * (x(i, c) - probes(p, c));
        sum += m.alpha(i) * y(i) * std::exp(-d2 / (hp.kernel_scale * hp.kernel_scale));
      }
      CHECK(pred(p) == (sum > 0 ? 1.0 : -1.0));
    }
  }
}

TEST_CASE("small random problems agree with the oracle and satisfy KKT") {
  int agree = 0;
  for (std::uint64_t seed = 1000; seed < 1050; ++seed) {
    const auto c = svm_cases::make_case(seed);
    const auto cmp = svm_cases::compare(c);
    CAPTURE(seed);
    CHECK(cmp.objective_error < 1e-4);
    CHECK(cmp.disagreements_near_zero);
    CHECK(cmp.worst_kkt <= 1e-3);
    CHECK(cmp.equality_residual <= 1e-8);
    CHECK(cmp.box_ok);
    agree += cmp.predictions_agree;
  }
  CHECK(agree >= 49);
}

TEST_CASE("separable data with large C reaches training accuracy 1") {
  Rng rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::MatrixXd x = testing_util::gaussian(30, 2, rng);
    Eigen::VectorXd y(30);
    for (int i = 0; i < 30; ++i) {
      y(i) = i % 2 ? 1.0 : -1.0;
      x(i, 0) += 4.0 * y(i);
    }
    CHECK(predict(train_svm(x, y, {1e3, 1.0}), x) == y);
  }
}

TEST_CASE("train_svm input errors") {
  Eigen::MatrixXd x(2, 1);
  x << 0, 1;
  Eigen::VectorXd same(2);
  same << 1, 1;
  CHECK_THROWS_AS(train_svm(x, same, {}), DataError);
  Eigen::VectorXd bad(2);
  bad << 1, 0;
  CHECK_THROWS_AS(train_svm(x, bad, {}), DataError);
  Eigen::VectorXd ok(2);
  ok << 1, -1;
  CHECK_THROWS_AS(train_svm(x, ok, {-1.0, 1.0}), DataError);
  const auto m = train_svm(x, ok, {});
  CHECK_THROWS_AS(decision_values(m, Eigen::MatrixXd::Zero(1, 2)), DimensionError);
  CHECK(svm_csv(m).rfind("kind,index,value", 0) == 0);
}
