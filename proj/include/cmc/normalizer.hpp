#pragma once

#include <Eigen/Dense>
#include <set>
#include <string>
#include <vector>

#include "cmc/cohort.hpp"

namespace cmc {

// Control-referenced z-scoring: per column mean and sample (n-1) standard
// deviation over control rows only. Columns whose control sd is at or below
// the floor are dropped.
struct NormalizationStats {
  std::vector<std::string> columns;  // original column names, in order
  Eigen::VectorXd mu;
  Eigen::VectorXd sigma;
  std::vector<bool> excluded;

  std::vector<Eigen::Index> retained() const;
  std::size_t n_retained() const;
};

constexpr double kDefaultSigmaFloor = 1e-12;

NormalizationStats fit_normalizer(const Eigen::MatrixXd& control_rows, std::vector<std::string> columns,
                                  double sigma_floor = kDefaultSigmaFloor);
NormalizationStats fit_normalizer(const MetricTable& table, const std::set<std::string>& control_ids,
                                  double sigma_floor = kDefaultSigmaFloor);

Eigen::MatrixXd apply_normalizer(const NormalizationStats& stats, const Eigen::MatrixXd& values);
// Column names must match the fitted ones exactly.
Eigen::MatrixXd apply_normalizer(const NormalizationStats& stats, const MetricTable& table);

// `column,mu,sigma,excluded`
std::string stats_csv(const NormalizationStats& stats);

}  // namespace cmc
