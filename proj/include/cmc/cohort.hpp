#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace cmc {

enum class Group { control, case_ };

// "control" and "mtbi" on disk; mtbi is the positive class.
std::string_view group_label(Group g);
Group parse_group(std::string_view s);

struct Subject {
  std::string id;
  Group group = Group::control;
  double age = 0.0;

  bool operator==(const Subject&) const = default;
};

// Subjects x metrics. Rows follow `row_ids`.
struct MetricTable {
  std::string set_name;
  std::vector<std::string> columns;
  std::vector<std::string> row_ids;
  Eigen::MatrixXd values;

  bool operator==(const MetricTable&) const = default;
};

// Case-subject rows, one column per symptom. Scores are 1..5; kMissing marks an
// absent answer.
struct SymptomTable {
  static constexpr int kMissing = 0;

  std::vector<std::string> columns;
  std::vector<std::string> row_ids;
  Eigen::MatrixXi scores;

  bool operator==(const SymptomTable&) const = default;
};

// The 22 Neurobehavioral Symptom Inventory items.
const std::vector<std::string>& default_symptom_names();

// Immutable after load. Subjects are sorted by id and every metric table's rows
// follow that order.
struct CohortDataset {
  std::vector<Subject> subjects;
  std::map<std::string, MetricTable> metrics;
  std::optional<SymptomTable> symptoms;

  std::size_t size() const { return subjects.size(); }
  std::set<std::string> ids_in(Group g) const;
  std::vector<Eigen::Index> rows_in(Group g) const;
  // +1 for case, -1 for control, in subject order.
  Eigen::VectorXd labels() const;
  Eigen::VectorXd ages() const;

  bool operator==(const CohortDataset&) const = default;
};

struct CohortPaths {
  std::filesystem::path subjects;
  std::map<std::string, std::filesystem::path> metrics;
  std::optional<std::filesystem::path> symptoms;
};

CohortDataset load_cohort(const CohortPaths& paths);

// Builds a dataset from in-memory parts, realigning rows by id and enforcing
// every cohort invariant. load_cohort goes through here.
CohortDataset make_cohort(std::vector<Subject> subjects, std::vector<MetricTable> tables,
                          std::optional<SymptomTable> symptoms);

// Writes subjects.csv, metrics_<set>.csv and (if present) symptoms.csv into dir,
// returning the paths written.
CohortPaths save_cohort(const CohortDataset& ds, const std::filesystem::path& dir);

struct ValidationReport {
  std::size_t n_controls = 0;
  std::size_t n_cases = 0;
  std::map<std::string, std::size_t> set_widths;
  bool symptoms_present = false;
  std::size_t symptom_rows = 0;
  // symptom name -> number of missing cells, in column order
  std::vector<std::pair<std::string, std::size_t>> symptom_missing;

  std::string to_string() const;
};

ValidationReport validate_cohort(const CohortDataset& ds);

}  // namespace cmc
