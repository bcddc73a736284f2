#pragma once

// Per-fold selection of the SVM box constraint and kernel scale by minimizing
// an inner stratified cross-validation misclassification rate.

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "cmc/svm.hpp"

namespace cmc {

enum class TunerKind { bayes, grid };

std::string_view tuner_label(TunerKind t);
TunerKind parse_tuner(std::string_view s);

struct TuneConfig {
  int budget = 30;
  double log10_c_low = -3.0, log10_c_high = 3.0;
  double log10_s_low = -3.0, log10_s_high = 3.0;
  int inner_folds = 5;
  std::uint64_t seed = 0;
  TunerKind tuner = TunerKind::grid;
  int grid_points = 7;   // per axis, grid mode
  int initial_points = 8;
  int pool_size = 1024;
  double gp_jitter = 1e-6;
  SmoSettings smo;

  void validate() const;
};

struct TuneEval {
  double log10_c = 0.0;
  double log10_s = 0.0;
  double loss = 0.0;
  double best_so_far = 0.0;
};

struct TuneTrace {
  std::vector<TuneEval> evals;
  std::size_t best_index = 0;
};

// Inner folds and pairwise squared distances, shared by every candidate of one
// optimization run.
class InnerCv {
 public:
  InnerCv(const Eigen::MatrixXd& features, const Eigen::VectorXd& labels, const TuneConfig& cfg);

  double loss(const SvmHyperparams& hp) const;
  int folds() const { return static_cast<int>(folds_.size()); }

 private:
  struct Fold {
    Eigen::MatrixXd train_sq;  // train x train squared distances
    Eigen::MatrixXd val_sq;    // val x train
    Eigen::VectorXd train_labels;
    Eigen::VectorXd val_labels;
    bool single_class = false;
  };
  std::vector<Fold> folds_;
  SmoSettings smo_;
};

// Mean misclassification rate over stratified inner folds seeded from
// cfg.seed. Fold count drops to the smaller class size (at least 2) when a
// class is too small.
double inner_cv_loss(const Eigen::MatrixXd& features, const Eigen::VectorXd& labels, const SvmHyperparams& hp,
                     const TuneConfig& cfg);

struct TuneResult {
  SvmHyperparams best;
  TuneTrace trace;
};

TuneResult optimize_hyperparams(const Eigen::MatrixXd& features, const Eigen::VectorXd& labels,
                                const TuneConfig& cfg);

// `eval_index,log10_C,log10_s,loss,best_so_far`
std::string trace_csv(const TuneTrace& trace);

}  // namespace cmc
