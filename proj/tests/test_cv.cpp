#include <doctest.h>

#include <array>

#include "cmc/csv.hpp"
#include "cmc/cv.hpp"
#include "cmc/error.hpp"

using namespace cmc;

namespace {

Eigen::VectorXd labels(int pos, int neg) {
  Eigen::VectorXd y(pos + neg);
  for (int i = 0; i < pos + neg; ++i) y(i) = i < pos ? 1.0 : -1.0;
  return y;
}

std::string fixed3(const MeanSd& m) { return csv::format_fixed(m.mean, 3) + " (" + csv::format_fixed(m.sd, 3) + ")"; }

}  // namespace

TEST_CASE("8 positives and 22 negatives in 4 folds: 2 positives and 5-6 negatives each") {
  const auto y = labels(8, 22);
  const auto plan = stratified_folds(y, 4, 1);
  for (int f = 0; f < 4; ++f) {
    int pos = 0, neg = 0;
    for (auto r : plan.validation_rows(f)) (y(r) > 0 ? pos : neg)++;
    CHECK(pos == 2);
    CHECK((neg == 5 || neg == 6));
    CHECK(plan.training_rows(f).size() + plan.validation_rows(f).size() == 30);
  }
}

TEST_CASE("k = 2 on {+,-,+,-}: one of each per fold; same seed gives the same plan") {
  Eigen::VectorXd y(4);
  y << 1, -1, 1, -1;
  const auto plan = stratified_folds(y, 2, 5);
  for (int f = 0; f < 2; ++f) {
    const auto rows = plan.validation_rows(f);
    REQUIRE(rows.size() == 2);
    CHECK(y(rows[0]) + y(rows[1]) == 0.0);
  }
  CHECK(stratified_folds(y, 2, 5).assignment == plan.assignment);
}

TEST_CASE("stratification bound holds for 100 seeds and assorted class sizes") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    for (auto [pos, neg, k] : std::array<std::array<int, 3>, 4>{{{8, 22, 4}, {5, 7, 3}, {13, 9, 5}, {4, 26, 4}}}) {
      const auto y = labels(pos, neg);
      const auto plan = stratified_folds(y, k, seed);
      std::vector<int> p(static_cast<std::size_t>(k)), n(static_cast<std::size_t>(k));
      for (Eigen::Index i = 0; i < y.size(); ++i) {
        const auto f = static_cast<std::size_t>(plan.assignment[static_cast<std::size_t>(i)]);
        REQUIRE(f < static_cast<std::size_t>(k));
        (y(i) > 0 ? p : n)[f]++;
      }
      CHECK(*std::max_element(p.begin(), p.end()) - *std::min_element(p.begin(), p.end()) <= 1);
      CHECK(*std::max_element(n.begin(), n.end()) - *std::min_element(n.begin(), n.end()) <= 1);
    }
  }
}

TEST_CASE("22/8 outer folds have sizes 8, 8, 7, 7") {
  const auto plan = stratified_folds(labels(8, 22), 4, 3);
  std::vector<std::size_t> sizes;
  for (int f = 0; f < 4; ++f) sizes.push_back(plan.validation_rows(f).size());
  std::sort(sizes.begin(), sizes.end());
  CHECK(sizes == std::vector<std::size_t>{7, 7, 8, 8});
}

TEST_CASE("fold plan errors") {
  CHECK_THROWS_AS(stratified_folds(labels(3, 3), 1, 0), Error);
  CHECK_THROWS_AS(stratified_folds(labels(0, 5), 2, 0), Error);
}

TEST_CASE("classification metrics examples") {
  auto r = classification_metrics({2, 0, 5, 0});
  CHECK(r.accuracy == 1.0);
  CHECK(r.recall == 1.0);
  CHECK(r.specificity == 1.0);
  r = classification_metrics({1, 0, 5, 1});
  CHECK(r.recall == 0.5);
  CHECK(r.specificity == 1.0);
  CHECK(r.accuracy == doctest::Approx(6.0 / 7.0));
  r = classification_metrics({0, 0, 6, 2});
  CHECK(r.recall == 0.0);
  CHECK(r.specificity == 1.0);
  CHECK_THROWS_AS(classification_metrics({0, 0, 5, 0}), UndefinedMetricError);
  CHECK_THROWS_AS(classification_metrics({2, 0, 0, 0}), UndefinedMetricError);
}

TEST_CASE("confusion counts sum to the fold size") {
  Eigen::VectorXd t(5), p(5);
  t << 1, 1, -1, -1, -1;
  p << 1, -1, 1, -1, -1;
  const auto c = confusion(t, p);
  CHECK(c == ConfusionCounts{1, 1, 2, 1});
  CHECK(c.total() == 5);
}

TEST_CASE("aggregation reproduces the published (mean, sd) pairs") {
  const std::array<double, 4> a{1, 0.5, 0.5, 0}, b{1, 1, 1, 0.5}, c{1, 1, 1, 6.0 / 7.0}, d{1, 1, 1, 1};
  CHECK(fixed3(aggregate_folds(a)) == "0.500 (0.354)");
  CHECK(fixed3(aggregate_folds(b)) == "0.875 (0.217)");
  CHECK(fixed3(aggregate_folds(c)) == "0.964 (0.062)");
  CHECK(fixed3(aggregate_folds(d)) == "1.000 (0.000)");
}
