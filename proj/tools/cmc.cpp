// Command-line front end: synth / run / report / validate.

#include <CLI11.hpp>
#include <iostream>

#include "cmc/config.hpp"
#include "cmc/error.hpp"
#include "cmc/pipeline.hpp"
#include "cmc/synth.hpp"

namespace {

int run_synth(const std::string& config, const std::string& out) {
  const auto cfg = cmc::SynthConfig::from(cmc::KeyValues::read(config));
  const auto cohort = cmc::generate_cohort(cfg);
  cmc::write_synthetic(cohort, cfg, out);
  std::cout << cmc::validate_cohort(cohort.dataset).to_string();
  std::cout << "wrote synthetic cohort to " << out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Control-referenced PCA + RBF-SVM component sweep"};
  app.require_subcommand(1);

  std::string synth_config, synth_out;
  auto* synth = app.add_subcommand("synth", "Generate a seeded synthetic cohort");
  synth->add_option("--config", synth_config, "Synthetic cohort config (key = value)")->required();
  synth->add_option("--out", synth_out, "Output directory")->required();

  std::string run_config, run_out, tuner, mode;
  std::uint64_t seed = 0;
  int threads = 0;
  bool raw_age = false;
  auto* run = app.add_subcommand("run", "Run the full pipeline");
  run->add_option("--config", run_config, "Run config (key = value); a previous manifest.txt also works")->required();
  run->add_option("--out", run_out, "Artifact directory")->required();
  run->add_option("--tuner", tuner, "Hyperparameter tuner")->check(CLI::IsMember({"bayes", "grid"}));
  run->add_option("--mode", mode, "Preprocessing leakage mode")->check(CLI::IsMember({"paper-faithful", "nested"}));
  auto* seed_opt = run->add_option("--seed", seed, "Seed for both fold assignment and tuning");
  run->add_option("--threads", threads, "Worker threads for the sweep grid")->check(CLI::PositiveNumber);
  run->add_flag("--raw-age", raw_age, "Use raw age instead of control-referenced z-scored age");

  std::string artifacts;
  auto* report = app.add_subcommand("report", "Re-render tables and charts from an artifact directory");
  report->add_option("--artifacts", artifacts, "Artifact directory written by run")->required();

  std::string validate_config;
  auto* validate = app.add_subcommand("validate", "Load a cohort and print its validation report");
  validate->add_option("--config", validate_config, "Run config naming the input files")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*synth) return run_synth(synth_config, synth_out);
    if (*run) {
      auto kv = cmc::KeyValues::read(run_config);
      if (!tuner.empty()) kv.set("tuner", tuner);
      if (!mode.empty()) kv.set("mode", mode);
      if (*seed_opt) {
        kv.set("fold_seed", std::to_string(seed));
        kv.set("tune_seed", std::to_string(seed));
      }
      if (threads > 0) kv.set("threads", std::to_string(threads));
      if (raw_age) kv.set("raw_age", "true");
      const auto cfg = cmc::RunConfig::from(kv, std::filesystem::path(run_config).parent_path());
      const auto art = cmc::run_pipeline(cfg);
      cmc::write_artifacts(art, run_out);
      std::cout << cmc::performance_table_csv([&] {
        std::vector<cmc::PerformanceRow> rows;
        for (const auto& s : art.sets) rows.push_back(cmc::performance_row(s.name, s.operating_point));
        if (art.combined_point) rows.push_back(cmc::performance_row("combined", *art.combined_point));
        return rows;
      }());
      for (const auto& n : art.notes) std::cout << "note: " << n << "\n";
      return 0;
    }
    if (*report) {
      cmc::render_report(artifacts);
      std::cout << "rendered report in " << artifacts << "\n";
      return 0;
    }
    if (*validate) {
      const auto kv = cmc::KeyValues::read(validate_config);
      const auto cfg = cmc::RunConfig::from(kv, std::filesystem::path(validate_config).parent_path());
      cmc::CohortPaths paths;
      paths.subjects = cfg.subjects;
      for (const auto& [name, path] : cfg.metric_sets) paths.metrics.emplace(name, path);
      paths.symptoms = cfg.symptoms;
      std::cout << cmc::validate_cohort(cmc::load_cohort(paths)).to_string();
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
