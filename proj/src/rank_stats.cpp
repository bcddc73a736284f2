#include "cmc/rank_stats.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <map>
#include <numeric>

#include "cmc/csv.hpp"
#include "cmc/error.hpp"

namespace cmc {

Eigen::VectorXd average_ranks(std::span<const double> values) {
  const auto n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] < values[b]; });
  Eigen::VectorXd ranks(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (auto t = i; t <= j; ++t) ranks(static_cast<Eigen::Index>(order[t])) = r;
    i = j + 1;
  }
  return ranks;
}

namespace {

struct RankPair {
  Eigen::VectorXd x;  // centered ranks
  Eigen::VectorXd y;
  double denom = 0.0;
};

RankPair centered_ranks(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DimensionError("spearman: length mismatch");
  if (x.size() < 3) throw DataError("spearman: at least 3 pairs are required");
  RankPair r;
  r.x = average_ranks(x);
  r.y = average_ranks(y);
  r.x.array() -= r.x.mean();
  r.y.array() -= r.y.mean();
  const double sxx = r.x.squaredNorm(), syy = r.y.squaredNorm();
  if (sxx == 0.0 || syy == 0.0) throw UndefinedCorrelationError("spearman: constant input");
  r.denom = std::sqrt(sxx * syy);
  return r;
}

double clamp_rho(double rho) { return std::clamp(rho, -1.0, 1.0); }

double exact_pvalue(const RankPair& r) {
  const auto n = static_cast<std::size_t>(r.x.size());
  const double observed = std::abs(r.x.dot(r.y)) / r.denom;
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::uint64_t hits = 0, total = 0;
  do {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += r.x(static_cast<Eigen::Index>(i)) * r.y(static_cast<Eigen::Index>(perm[i]));
    if (std::abs(s) / r.denom >= observed - 1e-12) ++hits;
    ++total;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return static_cast<double>(hits) / static_cast<double>(total);
}

}  // namespace

double spearman_rho(std::span<const double> x, std::span<const double> y) {
  const auto r = centered_ranks(x, y);
  return clamp_rho(r.x.dot(r.y) / r.denom);
}

std::string_view pvalue_method_label(PValueMethod m) {
  switch (m) {
    case PValueMethod::exact: return "exact";
    case PValueMethod::t_approx: return "t_approx";
    case PValueMethod::automatic: return "auto";
  }
  return "auto";
}

PValueMethod parse_pvalue_method(std::string_view s) {
  if (s == "exact") return PValueMethod::exact;
  if (s == "t_approx") return PValueMethod::t_approx;
  if (s == "auto") return PValueMethod::automatic;
  throw DataError("unknown p-value method '" + std::string(s) + "'");
}

double spearman_pvalue(std::span<const double> x, std::span<const double> y, PValueMethod method) {
  const auto r = centered_ranks(x, y);
  const auto n = x.size();
  if (method == PValueMethod::automatic) method = n <= kExactPValueMaxN ? PValueMethod::exact : PValueMethod::t_approx;
  if (method == PValueMethod::exact) return exact_pvalue(r);

  const double rho = clamp_rho(r.x.dot(r.y) / r.denom);
  if (std::abs(rho) >= 1.0) {
    if (n <= kExactPValueMaxN) return exact_pvalue(r);
    return std::min(1.0, 2.0 * std::exp(-std::lgamma(static_cast<double>(n) + 1.0)));
  }
  const double df = static_cast<double>(n) - 2.0;
  const double t = rho * std::sqrt(df / ((1.0 - rho) * (1.0 + rho)));
  const boost::math::students_t_distribution<double> dist(df);
  return std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t))));
}

BhResult bh_fdr(std::span<const double> pvalues, double q) {
  const auto m = pvalues.size();
  BhResult out{std::vector<bool>(m, false), std::vector<double>(m, 1.0)};
  if (m == 0) return out;
  for (double p : pvalues)
    if (!(p > 0.0 && p <= 1.0)) throw DataError("bh_fdr: p-values must lie in (0, 1]");
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return pvalues[a] < pvalues[b]; });

  const auto md = static_cast<double>(m);
  std::size_t cutoff = 0;  // number rejected
  for (std::size_t i = 1; i <= m; ++i)
    if (pvalues[order[i - 1]] <= static_cast<double>(i) / md * q) cutoff = i;
  for (std::size_t i = 0; i < cutoff; ++i) out.reject[order[i]] = true;

  // (m / i) * p rather than p * m / i: the factor rounds to >= 1, so the
  // adjusted value can never fall below the raw p.
  double running = 1.0;
  for (std::size_t i = m; i >= 1; --i) {
    running = std::min(running, md / static_cast<double>(i) * pvalues[order[i - 1]]);
    out.adjusted[order[i - 1]] = std::min(running, 1.0);
  }
  return out;
}

std::vector<CorrelationRecord> correlate_symptoms(std::span<const ComponentScores> sets, const SymptomTable& symptoms,
                                                  const CorrelationOptions& options) {
  std::vector<const ComponentScores*> ordered;
  for (const auto& s : sets) ordered.push_back(&s);
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const auto* a, const auto* b) { return a->metric_set < b->metric_set; });

  std::map<std::string, Eigen::Index> symptom_row;
  for (std::size_t i = 0; i < symptoms.row_ids.size(); ++i)
    symptom_row.emplace(symptoms.row_ids[i], static_cast<Eigen::Index>(i));

  std::vector<CorrelationRecord> records;
  for (const auto* set : ordered) {
    if (set->case_ids.size() != static_cast<std::size_t>(set->scores.rows()))
      throw DimensionError("correlate_symptoms: case ids do not match score rows for '" + set->metric_set + "'");
    for (Eigen::Index c = 0; c < set->scores.cols(); ++c) {
      for (std::size_t s = 0; s < symptoms.columns.size(); ++s) {
        CorrelationRecord rec;
        rec.metric_set = set->metric_set;
        rec.symptom = symptoms.columns[s];
        rec.component = static_cast<int>(c + 1);
        std::vector<double> xs, ys;
        for (std::size_t i = 0; i < set->case_ids.size(); ++i) {
          const auto it = symptom_row.find(set->case_ids[i]);
          if (it == symptom_row.end()) continue;
          const int v = symptoms.scores(it->second, static_cast<Eigen::Index>(s));
          if (v == SymptomTable::kMissing) continue;
          xs.push_back(set->scores(static_cast<Eigen::Index>(i), c));
          ys.push_back(static_cast<double>(v));
        }
        rec.n = xs.size();
        if (rec.n < 3) {
          rec.status = RecordStatus::insufficient_n;
        } else {
          try {
            rec.rho = spearman_rho(xs, ys);
            rec.p = spearman_pvalue(xs, ys, options.method);
            rec.significant_uncorrected = rec.p < options.alpha;
          } catch (const UndefinedCorrelationError&) {
            rec.status = RecordStatus::undefined_correlation;
          }
        }
        records.push_back(std::move(rec));
      }
    }
  }

  std::vector<double> ps;
  for (const auto& r : records)
    if (r.status == RecordStatus::ok) ps.push_back(r.p);
  const auto bh = bh_fdr(ps, options.q);
  std::size_t idx = 0;
  for (auto& r : records)
    if (r.status == RecordStatus::ok) {
      r.p_bh = bh.adjusted[idx];
      r.significant_fdr = bh.reject[idx];
      ++idx;
    }
  return records;
}

namespace {

std::string format_p(double p) {
  if (p >= 1e-4) return csv::format_fixed(p, 4);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", p);
  return buf;
}

}  // namespace

std::string correlation_csv_line(const CorrelationRecord& r) {
  std::string out = r.metric_set + "," + r.symptom + "," + std::to_string(r.component) + "," + std::to_string(r.n) + ",";
  if (r.status == RecordStatus::ok)
    out += csv::format_fixed(r.rho, 4) + "," + format_p(r.p) + "," + format_p(r.p_bh) + ",";
  else
    out += ",,,";
  out += std::string(r.significant_uncorrected ? "1" : "0") + "," + (r.significant_fdr ? "1" : "0");
  return out;
}

std::string correlations_csv(const std::vector<CorrelationRecord>& records) {
  std::string out = "metric_set,symptom,component,n,rho,p,p_bh,sig_uncorrected,sig_fdr\n";
  for (const auto& r : records) out += correlation_csv_line(r) + "\n";
  return out;
}

}  // namespace cmc
