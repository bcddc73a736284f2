#pragma once

// Spearman rank correlation with exact permutation p-values for small n, and
// Benjamini-Hochberg FDR control across a family of tests.

#include <Eigen/Dense>
#include <span>
#include <string>
#include <vector>

#include "cmc/cohort.hpp"

namespace cmc {

// Ties receive the mean of the ranks they span (1-based).
Eigen::VectorXd average_ranks(std::span<const double> values);

// Pearson correlation of average ranks. Throws UndefinedCorrelationError when
// either input is constant.
double spearman_rho(std::span<const double> x, std::span<const double> y);

enum class PValueMethod { exact, t_approx, automatic };

std::string_view pvalue_method_label(PValueMethod m);
PValueMethod parse_pvalue_method(std::string_view s);

// Largest n for which `automatic` enumerates permutations.
constexpr std::size_t kExactPValueMaxN = 10;

// Two-sided. exact: fraction of all n! orderings of y whose |rho| reaches the
// observed |rho| (minus 1e-12). t_approx: Student t with n-2 df.
double spearman_pvalue(std::span<const double> x, std::span<const double> y,
                       PValueMethod method = PValueMethod::automatic);

struct BhResult {
  std::vector<bool> reject;
  std::vector<double> adjusted;
};

BhResult bh_fdr(std::span<const double> pvalues, double q = 0.05);

enum class RecordStatus { ok, insufficient_n, undefined_correlation };

struct CorrelationRecord {
  std::string metric_set;
  std::string symptom;
  int component = 0;  // 1-based
  std::size_t n = 0;
  RecordStatus status = RecordStatus::ok;
  double rho = 0.0;
  double p = 1.0;
  double p_bh = 1.0;
  bool significant_uncorrected = false;
  bool significant_fdr = false;
};

// Case-subject scores on components 1..C0 of one metric set.
struct ComponentScores {
  std::string metric_set;
  std::vector<std::string> case_ids;
  Eigen::MatrixXd scores;
};

struct CorrelationOptions {
  double alpha = 0.05;
  double q = 0.05;
  PValueMethod method = PValueMethod::automatic;
};

// One record per (set, component, symptom), ordered that way with sets sorted
// by name. Each test uses the cases with both values present. BH runs jointly
// over every computed record.
std::vector<CorrelationRecord> correlate_symptoms(std::span<const ComponentScores> sets, const SymptomTable& symptoms,
                                                  const CorrelationOptions& options = {});

// `metric_set,symptom,component,n,rho,p,p_bh,sig_uncorrected,sig_fdr`
std::string correlations_csv(const std::vector<CorrelationRecord>& records);
std::string correlation_csv_line(const CorrelationRecord& r);

}  // namespace cmc
