#include "cmc/normalizer.hpp"

#include <cmath>

#include "cmc/csv.hpp"
#include "cmc/error.hpp"

namespace cmc {

std::vector<Eigen::Index> NormalizationStats::retained() const {
  std::vector<Eigen::Index> out;
  for (std::size_t j = 0; j < excluded.size(); ++j)
    if (!excluded[j]) out.push_back(static_cast<Eigen::Index>(j));
  return out;
}

std::size_t NormalizationStats::n_retained() const { return retained().size(); }

NormalizationStats fit_normalizer(const Eigen::MatrixXd& control_rows, std::vector<std::string> columns,
                                  double sigma_floor) {
  const Eigen::Index n = control_rows.rows();
  if (n < 2) throw DataError("normalizer: at least 2 control rows are required, got " + std::to_string(n));
  if (columns.size() != static_cast<std::size_t>(control_rows.cols()))
    throw DimensionError("normalizer: column names do not match matrix width");

  NormalizationStats stats;
  stats.columns = std::move(columns);
  stats.mu = control_rows.colwise().mean().transpose();
  const Eigen::MatrixXd centered = control_rows.rowwise() - stats.mu.transpose();
  stats.sigma = (centered.colwise().squaredNorm().array() / static_cast<double>(n - 1)).sqrt().transpose();
  stats.excluded.resize(stats.columns.size());
  std::size_t kept = 0;
  for (Eigen::Index j = 0; j < stats.sigma.size(); ++j) {
    const bool drop = !(stats.sigma(j) > sigma_floor);
    stats.excluded[static_cast<std::size_t>(j)] = drop;
    if (!drop) ++kept;
  }
  if (kept == 0) throw DataError("normalizer: every column has zero control variance");
  return stats;
}

NormalizationStats fit_normalizer(const MetricTable& table, const std::set<std::string>& control_ids,
                                  double sigma_floor) {
  std::vector<Eigen::Index> rows;
  for (std::size_t i = 0; i < table.row_ids.size(); ++i)
    if (control_ids.contains(table.row_ids[i])) rows.push_back(static_cast<Eigen::Index>(i));
  return fit_normalizer(table.values(rows, Eigen::all), table.columns, sigma_floor);
}

Eigen::MatrixXd apply_normalizer(const NormalizationStats& stats, const Eigen::MatrixXd& values) {
  if (static_cast<std::size_t>(values.cols()) != stats.columns.size())
    throw DimensionError("normalizer: expected " + std::to_string(stats.columns.size()) + " columns, got " +
                         std::to_string(values.cols()));
  const auto keep = stats.retained();
  Eigen::MatrixXd z(values.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) {
    const auto j = keep[c];
    z.col(static_cast<Eigen::Index>(c)) = (values.col(j).array() - stats.mu(j)) / stats.sigma(j);
  }
  return z;
}

Eigen::MatrixXd apply_normalizer(const NormalizationStats& stats, const MetricTable& table) {
  if (table.columns != stats.columns)
    throw DimensionError("normalizer: column names of '" + table.set_name + "' do not match the fitted columns");
  return apply_normalizer(stats, table.values);
}

std::string stats_csv(const NormalizationStats& stats) {
  std::string out = "column,mu,sigma,excluded\n";
  for (std::size_t j = 0; j < stats.columns.size(); ++j) {
    const auto i = static_cast<Eigen::Index>(j);
    out += stats.columns[j] + "," + csv::format_double(stats.mu(i)) + "," + csv::format_double(stats.sigma(i)) + "," +
           (stats.excluded[j] ? "1" : "0") + "\n";
  }
  return out;
}

}  // namespace cmc
