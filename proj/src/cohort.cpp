#include "cmc/cohort.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_map>

#include "cmc/csv.hpp"
#include "cmc/error.hpp"

namespace cmc {

std::string_view group_label(Group g) { return g == Group::control ? "control" : "mtbi"; }

Group parse_group(std::string_view s) {
  if (s == "control") return Group::control;
  if (s == "mtbi") return Group::case_;
  throw DataError("unknown group value '" + std::string(s) + "' (expected control or mtbi)");
}

const std::vector<std::string>& default_symptom_names() {
  static const std::vector<std::string> names = {
      "Dizziness",           "Loss of Balance",     "Poor Coordination", "Headaches",
      "Nausea",              "Vision Problems",     "Light Sensitivity", "Hearing Difficulty",
      "Noise Sensitivity",   "Numbness",            "Taste or Smell Changes", "Appetite Change",
      "Poor Concentration",  "Forgetfulness",       "Difficulty Making Decisions", "Slowed Thinking",
      "Fatigue",             "Difficulty Sleeping", "Anxiety",           "Feeling Depressed",
      "Irritability",        "Frustration"};
  return names;
}

std::set<std::string> CohortDataset::ids_in(Group g) const {
  std::set<std::string> out;
  for (const auto& s : subjects)
    if (s.group == g) out.insert(s.id);
  return out;
}

std::vector<Eigen::Index> CohortDataset::rows_in(Group g) const {
  std::vector<Eigen::Index> out;
  for (std::size_t i = 0; i < subjects.size(); ++i)
    if (subjects[i].group == g) out.push_back(static_cast<Eigen::Index>(i));
  return out;
}

Eigen::VectorXd CohortDataset::labels() const {
  Eigen::VectorXd y(static_cast<Eigen::Index>(subjects.size()));
  for (std::size_t i = 0; i < subjects.size(); ++i)
    y(static_cast<Eigen::Index>(i)) = subjects[i].group == Group::case_ ? 1.0 : -1.0;
  return y;
}

Eigen::VectorXd CohortDataset::ages() const {
  Eigen::VectorXd a(static_cast<Eigen::Index>(subjects.size()));
  for (std::size_t i = 0; i < subjects.size(); ++i) a(static_cast<Eigen::Index>(i)) = subjects[i].age;
  return a;
}

namespace {

// Index of each id in `ids`, rejecting duplicates.
std::unordered_map<std::string, std::size_t> index_ids(const std::vector<std::string>& ids, std::string_view what) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i].empty()) throw DataError(std::string(what) + ": empty subject id at row " + std::to_string(i + 1));
    if (!index.emplace(ids[i], i).second)
      throw DataError(std::string(what) + ": duplicate subject id '" + ids[i] + "'");
  }
  return index;
}

MetricTable align_table(MetricTable t, const std::vector<Subject>& subjects) {
  const std::string what = "metric set '" + t.set_name + "'";
  if (t.columns.empty()) throw DataError(what + ": no metric columns");
  if (static_cast<std::size_t>(t.values.cols()) != t.columns.size() ||
      static_cast<std::size_t>(t.values.rows()) != t.row_ids.size())
    throw DataError(what + ": value matrix shape does not match ids/columns");
  {
    std::set<std::string> seen;
    for (const auto& c : t.columns)
      if (!seen.insert(c).second) throw DataError(what + ": duplicate column '" + c + "'");
  }
  const auto index = index_ids(t.row_ids, what);
  std::unordered_map<std::string, std::size_t> subject_index;
  for (std::size_t i = 0; i < subjects.size(); ++i) subject_index.emplace(subjects[i].id, i);
  for (const auto& id : t.row_ids)
    if (!subject_index.contains(id)) throw DataError(what + ": row '" + id + "' has no matching subject");

  MetricTable out;
  out.set_name = t.set_name;
  out.columns = t.columns;
  out.values.resize(static_cast<Eigen::Index>(subjects.size()), t.values.cols());
  for (std::size_t i = 0; i < subjects.size(); ++i) {
    const auto it = index.find(subjects[i].id);
    if (it == index.end()) throw DataError(what + ": no row for subject '" + subjects[i].id + "'");
    out.values.row(static_cast<Eigen::Index>(i)) = t.values.row(static_cast<Eigen::Index>(it->second));
    out.row_ids.push_back(subjects[i].id);
  }
  if (!out.values.allFinite()) {
    for (Eigen::Index i = 0; i < out.values.rows(); ++i)
      for (Eigen::Index j = 0; j < out.values.cols(); ++j)
        if (!std::isfinite(out.values(i, j)))
          throw DataError(what + ": non-finite value for subject '" + out.row_ids[static_cast<std::size_t>(i)] +
                          "', column '" + out.columns[static_cast<std::size_t>(j)] + "'");
  }
  return out;
}

SymptomTable align_symptoms(SymptomTable t, const std::vector<Subject>& subjects) {
  const auto index = index_ids(t.row_ids, "symptoms");
  std::unordered_map<std::string, const Subject*> by_id;
  for (const auto& s : subjects) by_id.emplace(s.id, &s);
  for (const auto& id : t.row_ids) {
    const auto it = by_id.find(id);
    if (it == by_id.end()) throw DataError("symptoms: row '" + id + "' has no matching subject");
    if (it->second->group != Group::case_) throw DataError("symptoms: row '" + id + "' is not a case subject");
  }
  if (static_cast<std::size_t>(t.scores.cols()) != t.columns.size() ||
      static_cast<std::size_t>(t.scores.rows()) != t.row_ids.size())
    throw DataError("symptoms: score matrix shape does not match ids/columns");
  for (Eigen::Index i = 0; i < t.scores.rows(); ++i)
    for (Eigen::Index j = 0; j < t.scores.cols(); ++j) {
      const int v = t.scores(i, j);
      if (v != SymptomTable::kMissing && (v < 1 || v > 5))
        throw DataError("symptoms: value " + std::to_string(v) + " outside 1..5 for subject '" +
                        t.row_ids[static_cast<std::size_t>(i)] + "'");
    }
  SymptomTable out;
  out.columns = t.columns;
  out.scores.resize(t.scores.rows(), t.scores.cols());
  Eigen::Index r = 0;
  for (const auto& s : subjects) {
    const auto it = index.find(s.id);
    if (it == index.end()) continue;
    out.row_ids.push_back(s.id);
    out.scores.row(r++) = t.scores.row(static_cast<Eigen::Index>(it->second));
  }
  return out;
}

}  // namespace

CohortDataset make_cohort(std::vector<Subject> subjects, std::vector<MetricTable> tables,
                          std::optional<SymptomTable> symptoms) {
  {
    std::vector<std::string> ids;
    for (const auto& s : subjects) ids.push_back(s.id);
    index_ids(ids, "subjects");
  }
  for (const auto& s : subjects)
    if (!std::isfinite(s.age) || s.age < 0.0)
      throw DataError("subjects: invalid age for '" + s.id + "'");
  std::sort(subjects.begin(), subjects.end(), [](const Subject& a, const Subject& b) { return a.id < b.id; });
  const auto n_controls = std::count_if(subjects.begin(), subjects.end(),
                                        [](const Subject& s) { return s.group == Group::control; });
  if (n_controls < 2) throw DataError("subjects: at least 2 control subjects are required");

  CohortDataset ds;
  ds.subjects = std::move(subjects);
  for (auto& t : tables) {
    if (ds.metrics.contains(t.set_name)) throw DataError("duplicate metric set '" + t.set_name + "'");
    auto aligned = align_table(std::move(t), ds.subjects);
    ds.metrics.emplace(aligned.set_name, std::move(aligned));
  }
  if (symptoms) ds.symptoms = align_symptoms(std::move(*symptoms), ds.subjects);
  return ds;
}

namespace {

std::vector<Subject> read_subjects(const std::filesystem::path& path) {
  const auto t = csv::read(path);
  const auto c_id = t.column("subject_id");
  const auto c_group = t.column("group");
  const auto c_age = t.column("age");
  std::vector<Subject> out;
  for (const auto& row : t.rows) {
    Subject s;
    s.id = row[c_id];
    s.group = parse_group(row[c_group]);
    s.age = csv::parse_double(row[c_age], path.string() + " age for '" + s.id + "'");
    out.push_back(std::move(s));
  }
  return out;
}

MetricTable read_metrics(const std::string& set, const std::filesystem::path& path) {
  const auto t = csv::read(path);
  if (t.header.empty() || t.header[0] != "subject_id")
    throw DataError(path.string() + ": first column must be subject_id");
  MetricTable m;
  m.set_name = set;
  m.columns.assign(t.header.begin() + 1, t.header.end());
  m.values.resize(static_cast<Eigen::Index>(t.rows.size()), static_cast<Eigen::Index>(m.columns.size()));
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    m.row_ids.push_back(t.rows[i][0]);
    for (std::size_t j = 0; j < m.columns.size(); ++j) {
      const double v = csv::parse_double(t.rows[i][j + 1], path.string() + " '" + t.rows[i][0] + "'");
      m.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
    }
  }
  return m;
}

SymptomTable read_symptoms(const std::filesystem::path& path) {
  const auto t = csv::read(path);
  if (t.header.empty() || t.header[0] != "subject_id")
    throw DataError(path.string() + ": first column must be subject_id");
  SymptomTable s;
  s.columns.assign(t.header.begin() + 1, t.header.end());
  s.scores.resize(static_cast<Eigen::Index>(t.rows.size()), static_cast<Eigen::Index>(s.columns.size()));
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    s.row_ids.push_back(t.rows[i][0]);
    for (std::size_t j = 0; j < s.columns.size(); ++j) {
      const auto& cell = t.rows[i][j + 1];
      int v = SymptomTable::kMissing;
      if (!cell.empty()) {
        v = static_cast<int>(csv::parse_int(cell, path.string() + " '" + t.rows[i][0] + "'"));
        if (v < 1 || v > 5)
          throw DataError(path.string() + ": symptom value " + cell + " outside 1..5 for '" + t.rows[i][0] + "'");
      }
      s.scores(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
    }
  }
  return s;
}

}  // namespace

CohortDataset load_cohort(const CohortPaths& paths) {
  auto subjects = read_subjects(paths.subjects);
  std::vector<MetricTable> tables;
  for (const auto& [set, path] : paths.metrics) tables.push_back(read_metrics(set, path));
  std::optional<SymptomTable> symptoms;
  if (paths.symptoms) symptoms = read_symptoms(*paths.symptoms);
  return make_cohort(std::move(subjects), std::move(tables), std::move(symptoms));
}

CohortPaths save_cohort(const CohortDataset& ds, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  CohortPaths paths;
  paths.subjects = dir / "subjects.csv";
  {
    std::string out = "subject_id,group,age\n";
    for (const auto& s : ds.subjects)
      out += s.id + "," + std::string(group_label(s.group)) + "," + csv::format_double(s.age) + "\n";
    csv::write_text(paths.subjects, out);
  }
  for (const auto& [set, t] : ds.metrics) {
    std::string out = "subject_id";
    for (const auto& c : t.columns) out += "," + c;
    out += "\n";
    for (Eigen::Index i = 0; i < t.values.rows(); ++i) {
      out += t.row_ids[static_cast<std::size_t>(i)];
      for (Eigen::Index j = 0; j < t.values.cols(); ++j) out += "," + csv::format_double(t.values(i, j));
      out += "\n";
    }
    const auto p = dir / ("metrics_" + set + ".csv");
    csv::write_text(p, out);
    paths.metrics.emplace(set, p);
  }
  if (ds.symptoms) {
    const auto& s = *ds.symptoms;
    std::string out = "subject_id";
    for (const auto& c : s.columns) out += "," + c;
    out += "\n";
    for (Eigen::Index i = 0; i < s.scores.rows(); ++i) {
      out += s.row_ids[static_cast<std::size_t>(i)];
      for (Eigen::Index j = 0; j < s.scores.cols(); ++j) {
        out += ",";
        if (s.scores(i, j) != SymptomTable::kMissing) out += std::to_string(s.scores(i, j));
      }
      out += "\n";
    }
    paths.symptoms = dir / "symptoms.csv";
    csv::write_text(*paths.symptoms, out);
  }
  return paths;
}

ValidationReport validate_cohort(const CohortDataset& ds) {
  ValidationReport r;
  for (const auto& s : ds.subjects) (s.group == Group::control ? r.n_controls : r.n_cases)++;
  for (const auto& [set, t] : ds.metrics) r.set_widths[set] = t.columns.size();
  if (ds.symptoms) {
    r.symptoms_present = true;
    r.symptom_rows = ds.symptoms->row_ids.size();
    for (std::size_t j = 0; j < ds.symptoms->columns.size(); ++j) {
      const auto missing = (ds.symptoms->scores.col(static_cast<Eigen::Index>(j)).array() == SymptomTable::kMissing).count();
      r.symptom_missing.emplace_back(ds.symptoms->columns[j], static_cast<std::size_t>(missing));
    }
  }
  return r;
}

std::string ValidationReport::to_string() const {
  std::ostringstream os;
  os << "controls: " << n_controls << "\ncases: " << n_cases << "\n";
  std::size_t total = 0;
  for (const auto& [set, w] : set_widths) {
    os << "set " << set << ": " << w << " metrics\n";
    total += w;
  }
  os << "metrics per subject: " << total << "\n";
  if (!symptoms_present) {
    os << "symptoms: absent\n";
  } else {
    os << "symptoms: " << symptom_rows << " rows, " << symptom_missing.size() << " columns\n";
    for (const auto& [name, m] : symptom_missing)
      if (m > 0) os << "  missing " << m << ": " << name << "\n";
  }
  return os.str();
}

}  // namespace cmc
