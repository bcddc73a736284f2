#include "cmc/csv.hpp"
#include "cmc/error.hpp"
#include "cmc/pipeline.hpp"
#include "cmc/svg.hpp"

#include <fstream>
#include <sstream>

namespace cmc {

PerformanceRow performance_row(const std::string& name, const OperatingPoint& op) {
  return {name, op.c0, op.point.accuracy, op.point.recall, op.point.specificity};
}

std::string performance_csv_line(const PerformanceRow& row) {
  std::string out = row.metric_set + "," + std::to_string(row.c0);
  for (const auto& m : {row.accuracy, row.recall, row.specificity})
    out += "," + csv::format_fixed(m.mean, 3) + "," + csv::format_fixed(m.sd, 3);
  return out;
}

std::string performance_table_csv(const std::vector<PerformanceRow>& rows) {
  std::string out = "metric_set,c0,acc_mean,acc_sd,recall_mean,recall_sd,spec_mean,spec_sd\n";
  for (const auto& r : rows) out += performance_csv_line(r) + "\n";
  return out;
}

namespace {

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir))
    throw Error("[report] cannot create output directory " + dir.string());
}

void write(const std::filesystem::path& path, const std::string& text) {
  try {
    csv::write_text(path, text);
  } catch (const Error& e) {
    throw Error(std::string("[report] ") + e.what());
  }
}

void write_curves(const std::vector<const SweepCurve*>& curves, const std::filesystem::path& dir) {
  std::vector<PerformanceRow> rows;
  for (const auto* c : curves) {
    const auto op = select_c0(*c);
    rows.push_back(performance_row(c->name, op));
    write(dir / ("sweep_curve_" + c->name + ".svg"), sweep_chart_svg(*c, op.c0, c->name));
  }
  write(dir / "performance_table.csv", performance_table_csv(rows));
}

}  // namespace

void emit_report(const RunArtifacts& artifacts, const std::filesystem::path& out_dir) {
  ensure_dir(out_dir);
  std::vector<const SweepCurve*> curves;
  for (const auto& s : artifacts.sets) curves.push_back(&s.curve);
  if (artifacts.combined_curve) curves.push_back(&*artifacts.combined_curve);
  for (const auto* c : curves) write(out_dir / ("sweep_curve_" + c->name + ".csv"), sweep_csv(*c));
  write_curves(curves, out_dir);
  write(out_dir / "correlations.csv", correlations_csv(artifacts.correlations));
}

void write_artifacts(const RunArtifacts& artifacts, const std::filesystem::path& out_dir) {
  emit_report(artifacts, out_dir);
  for (const auto& s : artifacts.sets) {
    write(out_dir / ("normalizer_" + s.name + ".csv"), stats_csv(s.stats));
    write(out_dir / ("pca_" + s.name + ".csv"), pca_csv(s.pca));
  }
  write(out_dir / "manifest.txt", artifacts.manifest.to_string());
}

void render_report(const std::filesystem::path& artifact_dir) {
  const auto manifest = KeyValues::read(artifact_dir / "manifest.txt");
  std::vector<std::string> names;
  for (const auto& raw : csv::split(manifest.require("metric_sets"))) names.push_back(trim(raw));
  if (std::filesystem::exists(artifact_dir / "sweep_curve_combined.csv")) names.emplace_back("combined");

  std::vector<SweepCurve> curves;
  for (const auto& name : names) {
    const auto path = artifact_dir / ("sweep_curve_" + name + ".csv");
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("[report] missing " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    curves.push_back(parse_sweep_csv(ss.str(), name));
  }
  std::vector<const SweepCurve*> ptrs;
  for (const auto& c : curves) ptrs.push_back(&c);
  write_curves(ptrs, artifact_dir);
}

}  // namespace cmc
