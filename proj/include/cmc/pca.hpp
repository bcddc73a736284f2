#pragma once

// PCA fit on control z-scores; everyone else is projected into that space.

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>
#include <string>

#include "cmc/csv.hpp"
#include "cmc/error.hpp"

namespace cmc {

template <typename Scalar = double>
struct PcaModel {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using RowVector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

  Matrix components;        // metrics x k_max, orthonormal columns
  Vector singular_values;   // non-increasing, length k_max
  RowVector center;         // column means of the fit rows
  Eigen::Index n_fit = 0;

  Eigen::Index k_max() const { return components.cols(); }
  Eigen::Index n_metrics() const { return components.rows(); }
};

// Flips each column so its largest-magnitude entry is positive. Ties go to the
// lowest row index.
template <typename Derived>
void canonicalize_signs(Eigen::MatrixBase<Derived>& vectors) {
  for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
    Eigen::Index best = 0;
    for (Eigen::Index r = 1; r < vectors.rows(); ++r)
      if (std::abs(vectors(r, c)) > std::abs(vectors(best, c))) best = r;
    if (vectors(best, c) < 0) vectors.col(c) *= -1;
  }
}

// Rows are observations. The matrix is re-centered by its own column means, so
// inputs need not be exactly centered. k_max = min(rows - 1, cols).
template <typename Derived>
PcaModel<typename Derived::Scalar> fit_pca(const Eigen::MatrixBase<Derived>& rows) {
  using Scalar = typename Derived::Scalar;
  using Model = PcaModel<Scalar>;
  const Eigen::Index n = rows.rows();
  if (n < 2) throw DataError("pca: at least 2 rows are required, got " + std::to_string(n));
  if (!rows.allFinite()) throw DataError("pca: non-finite input");

  Model model;
  model.n_fit = n;
  model.center = rows.colwise().mean();
  const typename Model::Matrix centered = rows.rowwise() - model.center;
  const Eigen::Index k_max = std::min(n - 1, rows.cols());

  Eigen::JacobiSVD<typename Model::Matrix> svd(centered, Eigen::ComputeThinV);
  model.components = svd.matrixV().leftCols(k_max);
  model.singular_values = svd.singularValues().head(k_max);
  canonicalize_signs(model.components);
  return model;
}

// (z - center) * components[:, 0:k]
template <typename Scalar, typename Derived>
typename PcaModel<Scalar>::Matrix project(const PcaModel<Scalar>& model, const Eigen::MatrixBase<Derived>& z,
                                          Eigen::Index k) {
  if (k < 1 || k > model.k_max())
    throw DimensionError("pca: component count " + std::to_string(k) + " outside 1.." + std::to_string(model.k_max()));
  if (z.cols() != model.n_metrics())
    throw DimensionError("pca: expected " + std::to_string(model.n_metrics()) + " columns, got " +
                         std::to_string(z.cols()));
  return (z.rowwise() - model.center) * model.components.leftCols(k);
}

template <typename Scalar>
typename PcaModel<Scalar>::Vector explained_variance_ratio(const PcaModel<Scalar>& model) {
  const typename PcaModel<Scalar>::Vector sq = model.singular_values.array().square();
  const Scalar total = sq.sum();
  if (total <= Scalar(0)) return PcaModel<Scalar>::Vector::Zero(sq.size());
  return sq / total;
}

// `component,singular_value,explained_ratio,<loading per metric...>`
template <typename Scalar>
std::string pca_csv(const PcaModel<Scalar>& model) {
  const auto ratio = explained_variance_ratio(model);
  std::string out = "component,singular_value,explained_ratio";
  for (Eigen::Index j = 0; j < model.n_metrics(); ++j) out += ",m" + std::to_string(j + 1);
  out += "\n";
  for (Eigen::Index c = 0; c < model.k_max(); ++c) {
    out += std::to_string(c + 1) + "," + csv::format_double(static_cast<double>(model.singular_values(c))) + "," +
           csv::format_double(static_cast<double>(ratio(c)));
    for (Eigen::Index j = 0; j < model.n_metrics(); ++j)
      out += "," + csv::format_double(static_cast<double>(model.components(j, c)));
    out += "\n";
  }
  return out;
}

}  // namespace cmc
