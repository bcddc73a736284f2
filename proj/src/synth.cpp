#include "cmc/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "cmc/csv.hpp"
#include "cmc/error.hpp"
#include "cmc/rng.hpp"

namespace cmc {

void SynthConfig::validate() const {
  if (n_controls < 2) throw DataError("synth: need at least 2 controls");
  if (n_cases < 0) throw DataError("synth: case count must be non-negative");
  if (latent_dim < 1) throw DataError("synth: latent_dim must be at least 1");
  if (sets.empty()) throw DataError("synth: no metric sets");
  for (const auto& s : sets) {
    if (s.width < latent_dim)
      throw DataError("synth: set '" + s.name + "' width " + std::to_string(s.width) + " is below latent_dim " +
                      std::to_string(latent_dim));
    if (s.delta.size() != 0 && s.delta.size() != latent_dim)
      throw DataError("synth: delta for '" + s.name + "' must have latent_dim entries");
  }
  if (!(noise_sd >= 0)) throw DataError("synth: noise_sd must be non-negative");
  if (!(scale_low > 0) || !(scale_high >= scale_low)) throw DataError("synth: invalid scale range");
  if (!(age_min >= 0) || !(age_max >= age_min)) throw DataError("synth: invalid age range");
  if (!(missing_rate >= 0 && missing_rate <= 1)) throw DataError("synth: missing_rate must lie in [0, 1]");
  for (const auto& c : couplings) {
    if (!(c.strength >= 0 && c.strength <= 1)) throw DataError("synth: coupling strength must lie in [0, 1]");
    if (c.latent < 1 || c.latent > latent_dim) throw DataError("synth: coupling latent index out of range");
    if (std::none_of(sets.begin(), sets.end(), [&](const SynthSet& s) { return s.name == c.set; }))
      throw DataError("synth: coupling refers to unknown set '" + c.set + "'");
    if (std::find(symptoms.begin(), symptoms.end(), c.symptom) == symptoms.end())
      throw DataError("synth: coupling refers to unknown symptom '" + c.symptom + "'");
  }
}

namespace {

std::vector<double> parse_list(const std::string& s, std::string_view context) {
  std::vector<double> out;
  for (const auto& f : csv::split(s)) out.push_back(csv::parse_double(trim(f), context));
  return out;
}

std::string join_list(const Eigen::VectorXd& v) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) out += (i ? "," : "") + csv::format_double(v(i));
  return out;
}

std::string subject_id(char prefix, int index, int count) {
  const int digits = std::max(2, static_cast<int>(std::to_string(count).size()));
  auto number = std::to_string(index);
  if (static_cast<int>(number.size()) < digits) number.insert(0, static_cast<std::size_t>(digits) - number.size(), '0');
  return prefix + number;
}

}  // namespace

SynthConfig SynthConfig::from(const KeyValues& kv) {
  SynthConfig cfg;
  cfg.n_controls = static_cast<int>(kv.get_int("n_controls", cfg.n_controls));
  cfg.n_cases = static_cast<int>(kv.get_int("n_cases", cfg.n_cases));
  cfg.latent_dim = static_cast<int>(kv.get_int("latent_dim", cfg.latent_dim));
  cfg.latent_decay = kv.get_double("latent_decay", cfg.latent_decay);
  cfg.noise_sd = kv.get_double("noise_sd", cfg.noise_sd);
  cfg.scale_low = kv.get_double("scale_low", cfg.scale_low);
  cfg.scale_high = kv.get_double("scale_high", cfg.scale_high);
  cfg.age_min = kv.get_double("age_min", cfg.age_min);
  cfg.age_max = kv.get_double("age_max", cfg.age_max);
  cfg.missing_rate = kv.get_double("missing_rate", cfg.missing_rate);
  cfg.seed = kv.get_u64("seed", cfg.seed);
  if (auto sets = kv.get("sets")) {
    cfg.sets.clear();
    for (const auto& item : csv::split(*sets)) {
      const auto parts = csv::split(trim(item), ':');
      if (parts.size() != 2) throw DataError("synth: sets entries must look like name:width");
      cfg.sets.push_back({trim(parts[0]), static_cast<int>(csv::parse_int(parts[1], "synth sets")), {}});
    }
  }
  for (auto& s : cfg.sets) {
    if (auto d = kv.get("delta." + s.name)) {
      const auto values = parse_list(*d, "synth delta." + s.name);
      s.delta = Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
    }
  }
  if (auto names = kv.get("symptoms")) {
    cfg.symptoms.clear();
    for (const auto& n : csv::split(*names)) cfg.symptoms.push_back(trim(n));
  }
  if (auto couplings = kv.get("coupling")) {
    for (const auto& item : csv::split(*couplings, ';')) {
      if (trim(item).empty()) continue;
      const auto parts = csv::split(trim(item), ':');
      if (parts.size() != 4) throw DataError("synth: coupling entries must look like set:latent:symptom:strength");
      cfg.couplings.push_back({trim(parts[0]), static_cast<int>(csv::parse_int(parts[1], "synth coupling")),
                               trim(parts[2]), csv::parse_double(parts[3], "synth coupling")});
    }
  }
  cfg.validate();
  return cfg;
}

KeyValues SynthConfig::to_key_values() const {
  KeyValues kv;
  kv.set("n_controls", std::to_string(n_controls));
  kv.set("n_cases", std::to_string(n_cases));
  std::string set_list;
  for (const auto& s : sets) set_list += (set_list.empty() ? "" : ",") + s.name + ":" + std::to_string(s.width);
  kv.set("sets", set_list);
  kv.set("latent_dim", std::to_string(latent_dim));
  kv.set("latent_decay", csv::format_double(latent_decay));
  kv.set("noise_sd", csv::format_double(noise_sd));
  kv.set("scale_low", csv::format_double(scale_low));
  kv.set("scale_high", csv::format_double(scale_high));
  kv.set("age_min", csv::format_double(age_min));
  kv.set("age_max", csv::format_double(age_max));
  for (const auto& s : sets)
    if (s.delta.size() > 0) kv.set("delta." + s.name, join_list(s.delta));
  std::string names;
  for (const auto& n : symptoms) names += (names.empty() ? "" : ",") + n;
  kv.set("symptoms", names);
  std::string coupling;
  for (const auto& c : couplings)
    coupling += (coupling.empty() ? "" : ";") + c.set + ":" + std::to_string(c.latent) + ":" + c.symptom + ":" +
                csv::format_double(c.strength);
  if (!coupling.empty()) kv.set("coupling", coupling);
  kv.set("missing_rate", csv::format_double(missing_rate));
  kv.set("seed", std::to_string(seed));
  return kv;
}

SynthCohort generate_cohort(const SynthConfig& cfg) {
  cfg.validate();
  const int n = cfg.n_controls + cfg.n_cases;
  const int r = cfg.latent_dim;

  std::vector<Subject> subjects;
  for (int i = 0; i < n; ++i) {
    const bool is_case = i >= cfg.n_controls;
    Subject s;
    s.id = is_case ? subject_id('m', i - cfg.n_controls + 1, cfg.n_cases)
                   : subject_id('c', i + 1, cfg.n_controls);
    s.group = is_case ? Group::case_ : Group::control;
    Rng age_rng(cfg.seed, {hash_label("age"), hash_label(s.id)});
    s.age = age_rng.uniform(cfg.age_min, cfg.age_max);
    subjects.push_back(std::move(s));
  }
  // Generation order is the sorted id order used by the dataset.
  std::sort(subjects.begin(), subjects.end(), [](const Subject& a, const Subject& b) { return a.id < b.id; });

  SynthCohort out;
  out.truth.couplings = cfg.couplings;
  std::vector<MetricTable> tables;
  for (const auto& set : cfg.sets) {
    const auto set_key = hash_label(set.name);
    const int w = set.width;

    Rng load_rng(cfg.seed, {hash_label("loading"), set_key});
    Eigen::MatrixXd gauss(w, r);
    for (int j = 0; j < w; ++j)
      for (int c = 0; c < r; ++c) gauss(j, c) = load_rng.normal();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(gauss);
    Eigen::MatrixXd loadings = qr.householderQ() * Eigen::MatrixXd::Identity(w, r);
    const Eigen::MatrixXd rr = qr.matrixQR().topLeftCorner(r, r).triangularView<Eigen::Upper>();
    for (int c = 0; c < r; ++c) {
      if (rr(c, c) < 0) loadings.col(c) *= -1.0;
      loadings.col(c) *= std::sqrt(static_cast<double>(w)) * std::pow(cfg.latent_decay, c);
    }

    Rng scale_rng(cfg.seed, {hash_label("scale"), set_key});
    Eigen::VectorXd scales(w);
    for (int j = 0; j < w; ++j)
      scales(j) = std::exp(scale_rng.uniform(std::log(cfg.scale_low), std::log(cfg.scale_high)));

    Eigen::MatrixXd latent(n, r);
    MetricTable table;
    table.set_name = set.name;
    for (int j = 0; j < w; ++j) table.columns.push_back(set.name + "_m" + std::to_string(j + 1));
    table.values.resize(n, w);
    for (int i = 0; i < n; ++i) {
      const auto& s = subjects[static_cast<std::size_t>(i)];
      const auto subject_key = hash_label(s.id);
      Rng latent_rng(cfg.seed, {hash_label("latent"), set_key, subject_key});
      for (int c = 0; c < r; ++c) latent(i, c) = latent_rng.normal();
      if (s.group == Group::case_ && set.delta.size() == r) latent.row(i) += set.delta.transpose();
      Rng noise_rng(cfg.seed, {hash_label("noise"), set_key, subject_key});
      const Eigen::RowVectorXd signal = (latent.row(i) * loadings.transpose()).cwiseProduct(scales.transpose());
      for (int j = 0; j < w; ++j) table.values(i, j) = signal(j) + cfg.noise_sd * noise_rng.normal();
      table.row_ids.push_back(s.id);
    }
    std::vector<int> signal_dims;
    for (Eigen::Index c = 0; c < set.delta.size(); ++c)
      if (set.delta(c) != 0.0) signal_dims.push_back(static_cast<int>(c + 1));
    out.truth.signal_latents[set.name] = signal_dims;
    out.truth.latent[set.name] = latent;
    tables.push_back(std::move(table));
  }

  std::optional<SymptomTable> symptoms;
  if (cfg.n_cases > 0 && !cfg.symptoms.empty()) {
    std::vector<Eigen::Index> case_rows;
    for (int i = 0; i < n; ++i)
      if (subjects[static_cast<std::size_t>(i)].group == Group::case_) case_rows.push_back(i);
    SymptomTable st;
    st.columns = cfg.symptoms;
    st.scores.resize(static_cast<Eigen::Index>(case_rows.size()), static_cast<Eigen::Index>(cfg.symptoms.size()));
    for (std::size_t s = 0; s < cfg.symptoms.size(); ++s) {
      const auto& name = cfg.symptoms[s];
      double strength = 0.0;
      Eigen::VectorXd z = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(case_rows.size()));
      for (const auto& c : cfg.couplings) {
        if (c.symptom != name) continue;
        strength = c.strength;
        const Eigen::VectorXd t = out.truth.latent[c.set](case_rows, c.latent - 1);
        const double mean = t.mean();
        const double sd = t.size() > 1 ? std::sqrt((t.array() - mean).square().sum() / static_cast<double>(t.size() - 1)) : 0.0;
        z = sd > 0 ? Eigen::VectorXd((t.array() - mean) / sd) : Eigen::VectorXd::Zero(t.size());
      }
      for (std::size_t i = 0; i < case_rows.size(); ++i) {
        const auto& id = subjects[static_cast<std::size_t>(case_rows[i])].id;
        Rng srng(cfg.seed, {hash_label("symptom"), hash_label(name), hash_label(id)});
        const double e = srng.normal();
        const double raw = 3.0 + strength * z(static_cast<Eigen::Index>(i)) + (1.0 - strength) * e;
        int v = static_cast<int>(std::clamp(std::round(raw), 1.0, 5.0));
        if (cfg.missing_rate > 0 && srng.uniform() < cfg.missing_rate) v = SymptomTable::kMissing;
        st.scores(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(s)) = v;
      }
    }
    for (auto row : case_rows) st.row_ids.push_back(subjects[static_cast<std::size_t>(row)].id);
    symptoms = std::move(st);
  }

  out.dataset = make_cohort(std::move(subjects), std::move(tables), std::move(symptoms));
  return out;
}

std::string ground_truth_csv(const SynthCohort& cohort) {
  std::string out = "subject_id,group";
  for (const auto& [set, m] : cohort.truth.latent)
    for (Eigen::Index c = 0; c < m.cols(); ++c) out += "," + set + "_latent" + std::to_string(c + 1);
  out += "\n";
  const auto& subjects = cohort.dataset.subjects;
  for (std::size_t i = 0; i < subjects.size(); ++i) {
    out += subjects[i].id + "," + std::string(group_label(subjects[i].group));
    for (const auto& [set, m] : cohort.truth.latent)
      for (Eigen::Index c = 0; c < m.cols(); ++c) out += "," + csv::format_double(m(static_cast<Eigen::Index>(i), c));
    out += "\n";
  }
  return out;
}

CohortPaths write_synthetic(const SynthCohort& cohort, const SynthConfig& cfg, const std::filesystem::path& dir) {
  auto paths = save_cohort(cohort.dataset, dir);
  csv::write_text(dir / "ground_truth.csv", ground_truth_csv(cohort));
  csv::write_text(dir / "synth.cfg", cfg.to_key_values().to_string());
  KeyValues inputs;
  inputs.set("subjects", paths.subjects.filename().string());
  std::string names;
  for (const auto& [set, p] : paths.metrics) {
    inputs.set("metrics." + set, p.filename().string());
    names += (names.empty() ? "" : ",") + set;
  }
  inputs.set("metric_sets", names);
  if (paths.symptoms) inputs.set("symptoms", paths.symptoms->filename().string());
  csv::write_text(dir / "cohort.cfg", inputs.to_string());
  return paths;
}

}  // namespace cmc
