#include <doctest.h>

#include <algorithm>

#include "cmc/cohort.hpp"
#include "cmc/csv.hpp"
#include "cmc/error.hpp"
#include "cmc/synth.hpp"
#include "helpers.hpp"

using namespace cmc;
namespace fs = std::filesystem;

namespace {

void write(const fs::path& p, const std::string& text) { csv::write_text(p, text); }

}  // namespace

TEST_CASE("minimal cohort: two controls and one metric") {
  const auto dir = testing_util::scratch_dir("cohort_min");
  write(dir / "subjects.csv", "subject_id,group,age\ns2,control,30\ns1,control,40\n");
  write(dir / "m.csv", "subject_id,fa\ns1,0.5\ns2,0.7\n");
  const auto ds = load_cohort({dir / "subjects.csv", {{"dwi", dir / "m.csv"}}, std::nullopt});
  REQUIRE(ds.size() == 2);
  CHECK(ds.subjects[0].id == "s1");
  CHECK(ds.metrics.at("dwi").values.cols() == 1);
  CHECK(ds.metrics.at("dwi").values(0, 0) == 0.5);
  CHECK(ds.ages()(1) == 30.0);
  CHECK(!ds.symptoms.has_value());
}

TEST_CASE("load errors") {
  const auto dir = testing_util::scratch_dir("cohort_err");
  write(dir / "m.csv", "subject_id,fa\ns01,0.5\ns02,0.7\n");
  auto load = [&](const std::string& subjects, const std::string& metrics) {
    write(dir / "subjects.csv", subjects);
    write(dir / "m.csv", metrics);
    return load_cohort({dir / "subjects.csv", {{"dwi", dir / "m.csv"}}, std::nullopt});
  };
  const std::string ok_metrics = "subject_id,fa\ns01,0.5\ns02,0.7\n";
  CHECK_THROWS_AS(load("subject_id,group,age\ns01,control,30\ns01,control,40\n", ok_metrics), DataError);
  CHECK_THROWS_AS(load("subject_id,group,age\ns01,control,30\ns02,patient,40\n", ok_metrics), DataError);
  CHECK_THROWS_AS(load("subject_id,group,age\ns01,control,30\ns02,mtbi,40\n", ok_metrics), DataError);  // 1 control
  CHECK_THROWS_AS(load("subject_id,group,age\ns01,control,30\ns02,control,40\n", "subject_id,fa\ns01,nan\ns02,1\n"),
                  DataError);
  CHECK_THROWS_AS(load("subject_id,group,age\ns01,control,30\ns02,control,40\n",
                       "subject_id,fa\ns01,1\ns02,1\ns03,2\n"),
                  DataError);
  CHECK_THROWS_AS(load("subject_id,group,age\ns01,control,30\ns02,control,40\ns03,control,40\n", ok_metrics),
                  DataError);  // s03 has no metric row
  CHECK_NOTHROW(load("subject_id,group,age\ns01,control,30\ns02,control,40\n", ok_metrics));
}

TEST_CASE("symptom values outside 1..5 are rejected, blanks are missing") {
  const auto dir = testing_util::scratch_dir("cohort_sym");
  write(dir / "subjects.csv", "subject_id,group,age\nc1,control,30\nc2,control,31\nm1,mtbi,40\nm2,mtbi,41\n");
  write(dir / "m.csv", "subject_id,fa\nc1,1\nc2,2\nm1,3\nm2,4\n");
  write(dir / "s.csv", "subject_id,Fatigue,Irritability\nm1,3,\nm2,5,2\n");
  const auto ds = load_cohort({dir / "subjects.csv", {{"dwi", dir / "m.csv"}}, dir / "s.csv"});
  REQUIRE(ds.symptoms.has_value());
  CHECK(ds.symptoms->scores(0, 1) == SymptomTable::kMissing);
  const auto report = validate_cohort(ds);
  CHECK(report.symptoms_present);
  REQUIRE(report.symptom_missing.size() == 2);
  CHECK(report.symptom_missing[0].second == 0);
  CHECK(report.symptom_missing[1].second == 1);

  write(dir / "s.csv", "subject_id,Fatigue\nm1,6\nm2,1\n");
  CHECK_THROWS_AS(load_cohort({dir / "subjects.csv", {{"dwi", dir / "m.csv"}}, dir / "s.csv"}), DataError);
  write(dir / "s.csv", "subject_id,Fatigue\nc1,3\n");
  CHECK_THROWS_AS(load_cohort({dir / "subjects.csv", {{"dwi", dir / "m.csv"}}, dir / "s.csv"}), DataError);
}

TEST_CASE("study-shaped cohort validates with 1,344 metrics per subject") {
  SynthConfig cfg;
  cfg.seed = 3;
  const auto ds = generate_cohort(cfg).dataset;
  const auto report = validate_cohort(ds);
  CHECK(report.n_controls == 22);
  CHECK(report.n_cases == 8);
  CHECK(report.set_widths.at("dwi") == 12);
  CHECK(report.set_widths.at("t1w") == 1332);
  CHECK(report.to_string().find("metrics per subject: 1344") != std::string::npos);
}

TEST_CASE("absent symptom table is reported as absent") {
  SynthConfig cfg;
  cfg.sets = {{"dwi", 12, {}}};
  cfg.symptoms.clear();
  auto ds = generate_cohort(cfg).dataset;
  ds.symptoms.reset();
  const auto report = validate_cohort(ds);
  CHECK(!report.symptoms_present);
  CHECK(report.to_string().find("symptoms: absent") != std::string::npos);
}

TEST_CASE("save then load is the identity, and row order in files does not matter") {
  SynthConfig cfg;
  cfg.sets = {{"dwi", 12, {}}, {"t1w", 40, {}}};
  cfg.missing_rate = 0.1;
  cfg.seed = 21;
  const auto ds = generate_cohort(cfg).dataset;
  const auto dir = testing_util::scratch_dir("cohort_roundtrip");
  const auto paths = save_cohort(ds, dir);
  const auto back = load_cohort(paths);
  CHECK(back == ds);
  const auto snapshot = back;
  (void)validate_cohort(back);
  CHECK(back == snapshot);

  // Reverse the data rows of every file.
  auto reverse_rows = [](const fs::path& p) {
    const auto text = testing_util::slurp(p);
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start < text.size()) {
      const auto end = text.find('\n', start);
      lines.push_back(text.substr(start, end - start));
      start = end + 1;
    }
    std::reverse(lines.begin() + 1, lines.end());
    std::string out;
    for (const auto& l : lines) out += l + "\n";
    csv::write_text(p, out);
  };
  reverse_rows(paths.subjects);
  for (const auto& [name, p] : paths.metrics) reverse_rows(p);
  reverse_rows(*paths.symptoms);
  CHECK(load_cohort(paths) == ds);
}

TEST_CASE("make_cohort realigns tables to sorted ids") {
  std::vector<Subject> subjects = {{"b", Group::control, 30}, {"a", Group::control, 31}, {"c", Group::case_, 32}};
  MetricTable t{"x", {"m1", "m2"}, {"c", "a", "b"}, Eigen::MatrixXd(3, 2)};
  t.values << 3, 30, 1, 10, 2, 20;
  const auto ds = make_cohort(subjects, {t}, std::nullopt);
  CHECK(ds.subjects[0].id == "a");
  CHECK(ds.metrics.at("x").values(0, 1) == 10);
  CHECK(ds.metrics.at("x").values(2, 0) == 3);
  CHECK(ds.labels()(2) == 1.0);
  CHECK(ds.rows_in(Group::control) == std::vector<Eigen::Index>{0, 1});
}
