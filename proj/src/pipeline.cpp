#include "cmc/pipeline.hpp"

#include <chrono>
#include <ctime>
#include <limits>

#include "cmc/csv.hpp"
#include "cmc/error.hpp"
#include "cmc/rng.hpp"

namespace cmc {

std::string_view leakage_label(LeakageMode m) { return m == LeakageMode::nested ? "nested" : "paper-faithful"; }

LeakageMode parse_leakage(std::string_view s) {
  if (s == "paper-faithful") return LeakageMode::paper_faithful;
  if (s == "nested") return LeakageMode::nested;
  throw DataError("unknown mode '" + std::string(s) + "' (expected paper-faithful or nested)");
}

namespace {

std::filesystem::path resolve(const std::string& p, const std::filesystem::path& base) {
  std::filesystem::path path(p);
  if (path.is_relative()) path = base / path;
  return path.lexically_normal();
}

template <typename F>
auto stage(std::string_view name, F&& f) {
  try {
    return f();
  } catch (const std::exception& e) {
    throw Error("[" + std::string(name) + "] " + e.what());
  }
}

}  // namespace

RunConfig RunConfig::from(const KeyValues& kv, const std::filesystem::path& base_dir) {
  RunConfig cfg;
  cfg.subjects = resolve(kv.require("subjects"), base_dir);
  if (auto names = kv.get("metric_sets")) {
    for (const auto& raw : csv::split(*names)) {
      const auto name = trim(raw);
      if (name.empty()) continue;
      cfg.metric_sets.emplace_back(name, resolve(kv.require("metrics." + name), base_dir));
    }
  } else {
    for (const auto& [name, path] : kv.with_prefix("metrics.")) cfg.metric_sets.emplace_back(name, resolve(path, base_dir));
  }
  if (auto s = kv.get("symptoms"); s && !s->empty()) cfg.symptoms = resolve(*s, base_dir);

  cfg.outer_folds = static_cast<int>(kv.get_int("outer_folds", cfg.outer_folds));
  const auto seed = kv.get_u64("seed", 1);
  cfg.fold_seed = kv.get_u64("fold_seed", seed);
  cfg.tune.seed = kv.get_u64("tune_seed", seed);
  cfg.tune.tuner = parse_tuner(kv.get_or("tuner", "grid"));
  cfg.tune.budget = static_cast<int>(kv.get_int("budget", cfg.tune.budget));
  cfg.tune.inner_folds = static_cast<int>(kv.get_int("inner_folds", cfg.tune.inner_folds));
  cfg.tune.grid_points = static_cast<int>(kv.get_int("grid_points", cfg.tune.grid_points));
  cfg.tune.log10_c_low = kv.get_double("log10_c_low", cfg.tune.log10_c_low);
  cfg.tune.log10_c_high = kv.get_double("log10_c_high", cfg.tune.log10_c_high);
  cfg.tune.log10_s_low = kv.get_double("log10_s_low", cfg.tune.log10_s_low);
  cfg.tune.log10_s_high = kv.get_double("log10_s_high", cfg.tune.log10_s_high);
  cfg.mode = parse_leakage(kv.get_or("mode", "paper-faithful"));
  cfg.raw_age = kv.get_bool("raw_age", cfg.raw_age);
  cfg.combined = kv.get_bool("combined", cfg.combined);
  cfg.correlation.alpha = kv.get_double("alpha", cfg.correlation.alpha);
  cfg.correlation.q = kv.get_double("q", cfg.correlation.q);
  cfg.correlation.method = parse_pvalue_method(kv.get_or("pvalue_method", "auto"));
  cfg.sigma_floor = kv.get_double("sigma_floor", cfg.sigma_floor);
  cfg.threads = static_cast<int>(kv.get_int("threads", cfg.threads));
  cfg.validate();
  return cfg;
}

KeyValues RunConfig::to_key_values() const {
  KeyValues kv;
  kv.set("subjects", std::filesystem::absolute(subjects).lexically_normal().string());
  std::string names;
  for (const auto& [name, path] : metric_sets) names += (names.empty() ? "" : ",") + name;
  kv.set("metric_sets", names);
  for (const auto& [name, path] : metric_sets)
    kv.set("metrics." + name, std::filesystem::absolute(path).lexically_normal().string());
  kv.set("symptoms", symptoms ? std::filesystem::absolute(*symptoms).lexically_normal().string() : "");
  kv.set("outer_folds", std::to_string(outer_folds));
  kv.set("fold_seed", std::to_string(fold_seed));
  kv.set("tune_seed", std::to_string(tune.seed));
  kv.set("tuner", std::string(tuner_label(tune.tuner)));
  kv.set("budget", std::to_string(tune.budget));
  kv.set("inner_folds", std::to_string(tune.inner_folds));
  kv.set("grid_points", std::to_string(tune.grid_points));
  kv.set("log10_c_low", csv::format_double(tune.log10_c_low));
  kv.set("log10_c_high", csv::format_double(tune.log10_c_high));
  kv.set("log10_s_low", csv::format_double(tune.log10_s_low));
  kv.set("log10_s_high", csv::format_double(tune.log10_s_high));
  kv.set("mode", std::string(leakage_label(mode)));
  kv.set("raw_age", raw_age ? "true" : "false");
  kv.set("combined", combined ? "true" : "false");
  kv.set("alpha", csv::format_double(correlation.alpha));
  kv.set("q", csv::format_double(correlation.q));
  kv.set("pvalue_method", std::string(pvalue_method_label(correlation.method)));
  kv.set("sigma_floor", csv::format_double(sigma_floor));
  kv.set("threads", std::to_string(threads));
  return kv;
}

void RunConfig::validate() const {
  if (metric_sets.empty()) throw DataError("config: no metric sets");
  if (outer_folds < 2) throw DataError("config: outer_folds must be at least 2");
  if (threads < 1) throw DataError("config: threads must be at least 1");
  if (!(correlation.alpha > 0 && correlation.alpha < 1) || !(correlation.q > 0 && correlation.q < 1))
    throw DataError("config: alpha and q must lie in (0, 1)");
  tune.validate();
}

RunArtifacts run_pipeline(const RunConfig& cfg) {
  const auto ds = stage("load", [&] {
    CohortPaths paths;
    paths.subjects = cfg.subjects;
    for (const auto& [name, path] : cfg.metric_sets) paths.metrics.emplace(name, path);
    paths.symptoms = cfg.symptoms;
    return load_cohort(paths);
  });
  return run_pipeline(cfg, ds);
}

namespace {

// Control-referenced z-score of age, or the raw value.
Eigen::VectorXd age_feature(const Eigen::VectorXd& ages, const std::vector<Eigen::Index>& control_rows, bool raw) {
  if (raw) return ages;
  const auto stats = fit_normalizer(Eigen::MatrixXd(ages(control_rows)), {"age"});
  if (stats.excluded[0]) return Eigen::VectorXd::Zero(ages.size());
  return apply_normalizer(stats, Eigen::MatrixXd(ages)).col(0);
}

struct Projection {
  Eigen::MatrixXd scores;
  Eigen::Index k_max = 0;
};

Projection project_all(const Eigen::MatrixXd& values, const std::vector<std::string>& columns,
                       const std::vector<Eigen::Index>& control_rows, double sigma_floor) {
  const Eigen::MatrixXd control_values = values(control_rows, Eigen::all);
  const auto stats = fit_normalizer(control_values, columns, sigma_floor);
  const Eigen::MatrixXd z = apply_normalizer(stats, values);
  const auto pca = fit_pca(Eigen::MatrixXd(z(control_rows, Eigen::all)));
  return {project(pca, z, pca.k_max()), pca.k_max()};
}

std::vector<Eigen::Index> controls_among(const std::vector<Eigen::Index>& rows, const Eigen::VectorXd& labels) {
  std::vector<Eigen::Index> out;
  for (auto r : rows)
    if (labels(r) < 0) out.push_back(r);
  return out;
}

std::string timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

RunArtifacts run_pipeline(const RunConfig& cfg, const CohortDataset& ds) {
  cfg.validate();
  RunArtifacts art;
  art.validation = validate_cohort(ds);
  for (const auto& [name, path] : cfg.metric_sets)
    if (!ds.metrics.contains(name)) throw Error("[validate] metric set '" + name + "' is not in the dataset");

  const Eigen::VectorXd labels = ds.labels();
  const auto control_rows = ds.rows_in(Group::control);
  const auto n_pos = (labels.array() > 0).count();
  if (n_pos < cfg.outer_folds)
    throw Error("[folds] " + std::to_string(n_pos) + " case subjects cannot fill " + std::to_string(cfg.outer_folds) +
                " stratified folds");
  const auto plan = stage("folds", [&] { return stratified_folds(labels, cfg.outer_folds, cfg.fold_seed); });
  const Eigen::VectorXd age = stage("normalize", [&] { return age_feature(ds.ages(), control_rows, cfg.raw_age); });
  const SweepOptions opts{cfg.threads};

  auto tune_for = [&](const std::string& curve) {
    TuneConfig t = cfg.tune;
    t.seed = stream_seed(cfg.tune.seed, {hash_label(curve)});
    return t;
  };

  // Per-fold projections and ages for nested mode.
  struct FoldView {
    std::vector<Eigen::MatrixXd> scores;  // per fold, all subjects x k_max_f
    Eigen::Index length = 0;
  };
  std::vector<FoldView> nested(cfg.metric_sets.size());
  std::vector<Eigen::VectorXd> nested_age;
  if (cfg.mode == LeakageMode::nested) {
    stage("nested-preprocess", [&] {
      for (int f = 0; f < plan.k; ++f)
        nested_age.push_back(age_feature(ds.ages(), controls_among(plan.training_rows(f), labels), cfg.raw_age));
      for (std::size_t s = 0; s < cfg.metric_sets.size(); ++s) {
        const auto& table = ds.metrics.at(cfg.metric_sets[s].first);
        nested[s].length = std::numeric_limits<Eigen::Index>::max();
        for (int f = 0; f < plan.k; ++f) {
          auto proj = project_all(table.values, table.columns, controls_among(plan.training_rows(f), labels),
                                  cfg.sigma_floor);
          nested[s].length = std::min(nested[s].length, proj.k_max);
          nested[s].scores.push_back(std::move(proj.scores));
        }
      }
      return 0;
    });
  }

  for (std::size_t s = 0; s < cfg.metric_sets.size(); ++s) {
    const auto& name = cfg.metric_sets[s].first;
    const auto& table = ds.metrics.at(name);
    SetResult r;
    r.name = name;
    stage("normalize:" + name, [&] {
      r.stats = fit_normalizer(table, ds.ids_in(Group::control), cfg.sigma_floor);
      return 0;
    });
    const Eigen::MatrixXd z = apply_normalizer(r.stats, table);
    stage("pca:" + name, [&] {
      r.pca = fit_pca(Eigen::MatrixXd(z(control_rows, Eigen::all)));
      r.scores = project(r.pca, z, r.pca.k_max());
      return 0;
    });
    r.curve = stage("sweep:" + name, [&] {
      if (cfg.mode == LeakageMode::paper_faithful)
        return sweep_individual(r.scores, age, labels, plan, tune_for(name), opts, name);
      const auto& view = nested[s];
      FeatureSource source = [&](int k, int fold) {
        const auto& sc = view.scores[static_cast<std::size_t>(fold)];
        Eigen::MatrixXd x(sc.rows(), k + 1);
        x.leftCols(k) = sc.leftCols(k);
        x.col(k) = nested_age[static_cast<std::size_t>(fold)];
        return x;
      };
      return run_sweep(source, static_cast<int>(view.length), labels, plan, tune_for(name), opts, name);
    });
    r.operating_point = select_c0(r.curve);
    art.sets.push_back(std::move(r));
  }

  if (cfg.combined && art.sets.size() >= 2) {
    art.combined_curve = stage("sweep:combined", [&] {
      if (cfg.mode == LeakageMode::paper_faithful) {
        std::vector<CombinedInput> inputs;
        for (const auto& r : art.sets) inputs.push_back({r.scores, r.operating_point.c0});
        return sweep_combined(inputs, age, labels, plan, tune_for("combined"), opts);
      }
      int length = 0;
      for (const auto& r : art.sets) length = std::max(length, r.operating_point.c0);
      FeatureSource source = [&](int k, int fold) {
        std::vector<CombinedInput> inputs;
        for (std::size_t s = 0; s < art.sets.size(); ++s)
          inputs.push_back({nested[s].scores[static_cast<std::size_t>(fold)], art.sets[s].operating_point.c0});
        return combined_features(inputs, nested_age[static_cast<std::size_t>(fold)], k);
      };
      return run_sweep(source, length, labels, plan, tune_for("combined"), opts, "combined");
    });
    art.combined_point = select_c0(*art.combined_curve);
  } else if (art.sets.size() >= 2) {
    art.notes.push_back("combined sweep disabled");
  }

  if (ds.symptoms) {
    art.correlations = stage("correlate", [&] {
      const auto case_rows = ds.rows_in(Group::case_);
      std::vector<std::string> case_ids;
      for (auto r : case_rows) case_ids.push_back(ds.subjects[static_cast<std::size_t>(r)].id);
      std::vector<ComponentScores> inputs;
      for (const auto& r : art.sets) {
        int comps = r.operating_point.c0;
        if (art.combined_point) comps = std::min(comps, art.combined_point->c0);
        inputs.push_back({r.name, case_ids, r.scores(case_rows, Eigen::seqN(0, comps))});
      }
      return correlate_symptoms(inputs, *ds.symptoms, cfg.correlation);
    });
  } else {
    art.notes.push_back("no symptom table: correlation stage skipped");
  }

  art.manifest = cfg.to_key_values();
  art.manifest.set("tool_version", std::string(kToolVersion));
  art.manifest.set("created", timestamp());
  art.manifest.set("combined_endpoint_rule", "max(c0) over sets; set i contributes PCs 1..min(k, c0_i) at step k");
  for (const auto& r : art.sets) {
    art.manifest.set("k_max." + r.name, std::to_string(r.pca.k_max()));
    art.manifest.set("sweep_length." + r.name, std::to_string(r.curve.points.size()));
    art.manifest.set("c0." + r.name, std::to_string(r.operating_point.c0));
  }
  if (art.combined_point) art.manifest.set("c0.combined", std::to_string(art.combined_point->c0));
  for (std::size_t i = 0; i < art.notes.size(); ++i) art.manifest.set("note." + std::to_string(i + 1), art.notes[i]);
  return art;
}

}  // namespace cmc
