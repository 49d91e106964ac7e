#include "advr/domain.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "advr/builtin_data.hpp"
#include "advr/errors.hpp"
#include "advr/rng.hpp"

namespace advr {

using nlohmann::json;

std::string to_string(DiagnosisLabel label) {
  switch (label) {
    case DiagnosisLabel::CN: return "CN";
    case DiagnosisLabel::MCI: return "MCI";
    case DiagnosisLabel::Dementia: return "Dementia";
  }
  throw std::logic_error("unhandled DiagnosisLabel");
}

std::optional<DiagnosisLabel> parse_diagnosis_label(std::string_view token) {
  if (token == "CN") return DiagnosisLabel::CN;
  if (token == "MCI") return DiagnosisLabel::MCI;
  if (token == "Dementia") return DiagnosisLabel::Dementia;
  return std::nullopt;
}

std::string to_string(Sex sex) { return sex == Sex::M ? "M" : "F"; }

std::optional<Sex> parse_sex(std::string_view token) {
  if (token == "M") return Sex::M;
  if (token == "F") return Sex::F;
  return std::nullopt;
}

std::string to_string(BinaryTask task) {
  return task == BinaryTask::CN_vs_CI ? "CN_vs_CI" : "CN_vs_MCI";
}

std::optional<BinaryTask> parse_binary_task(std::string_view token) {
  if (token == "CN_vs_CI") return BinaryTask::CN_vs_CI;
  if (token == "CN_vs_MCI") return BinaryTask::CN_vs_MCI;
  return std::nullopt;
}

std::optional<BinaryClass> binarize_label(BinaryTask task, DiagnosisLabel label) {
  switch (label) {
    case DiagnosisLabel::CN: return BinaryClass::Negative;
    case DiagnosisLabel::MCI: return BinaryClass::Positive;
    case DiagnosisLabel::Dementia:
      if (task == BinaryTask::CN_vs_CI) return BinaryClass::Positive;
      return std::nullopt;  // Dementia visits are outside CN vs MCI
  }
  throw std::logic_error("unhandled DiagnosisLabel");
}

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

void require_finite(double v, const std::string& what) {
  require(std::isfinite(v), what + " must be finite");
}

}  // namespace

void SubjectVisit::validate() const {
  require(!subject_id.empty(), "subject_id must be non-empty");
  require(!visit_id.empty(), "visit_id must be non-empty");
  require_finite(age, "age");
  require(age >= 18.0 && age <= 110.0, "age must be in [18, 110]");
  for (const auto& [region, volume] : structural_volumes) {
    require_finite(volume, "structural volume '" + region + "'");
    require(volume > 0.0, "structural volume '" + region + "' must be positive");
  }
  for (const auto& [analyte, lab] : lab_values) {
    require_finite(lab.value, "lab value '" + analyte + "'");
    require(!lab.unit.empty(), "lab unit for '" + analyte + "' must be non-empty");
  }
  for (const auto& [name, value] : biomarkers) {
    require_finite(value, "biomarker '" + name + "'");
    require(value >= 0.0, "biomarker '" + name + "' must be non-negative");
  }
  for (const auto& [test, score] : cognitive_scores) {
    require_finite(score, "cognitive score '" + test + "'");
  }
  if (auto it = cognitive_scores.find("MMSE"); it != cognitive_scores.end()) {
    require(it->second >= 0.0 && it->second <= 30.0, "MMSE must be in [0, 30]");
  }
  if (auto it = genetics.find("APOE-e4"); it != genetics.end()) {
    require(it->second == "0" || it->second == "1" || it->second == "2",
            "APOE-e4 allele count must be one of 0, 1, 2");
  }
}

namespace {

json string_map_to_json(const std::map<std::string, std::string>& m) {
  json out = json::object();
  for (const auto& [k, v] : m) out[k] = v;
  return out;
}

json double_map_to_json(const std::map<std::string, double>& m) {
  json out = json::object();
  for (const auto& [k, v] : m) out[k] = v;
  return out;
}

std::map<std::string, std::string> string_map_from_json(const json& doc, const char* field) {
  std::map<std::string, std::string> out;
  if (!doc.contains(field)) return out;
  const json& obj = doc.at(field);
  if (!obj.is_object()) throw ConfigError(field, "expected an object");
  for (const auto& [k, v] : obj.items()) {
    if (!v.is_string()) throw ConfigError(field, "value for '" + k + "' must be a string");
    out[k] = v.get<std::string>();
  }
  return out;
}

std::map<std::string, double> double_map_from_json(const json& doc, const char* field) {
  std::map<std::string, double> out;
  if (!doc.contains(field)) return out;
  const json& obj = doc.at(field);
  if (!obj.is_object()) throw ConfigError(field, "expected an object");
  for (const auto& [k, v] : obj.items()) {
    if (!v.is_number()) throw ConfigError(field, "value for '" + k + "' must be a number");
    out[k] = v.get<double>();
  }
  return out;
}

}  // namespace

json visit_to_json(const SubjectVisit& visit) {
  json labs = json::object();
  for (const auto& [analyte, lab] : visit.lab_values) {
    labs[analyte] = json{{"value", lab.value}, {"unit", lab.unit}};
  }
  return json{{"subject_id", visit.subject_id},
              {"visit_id", visit.visit_id},
              {"age", visit.age},
              {"sex", to_string(visit.sex)},
              {"structural_volumes", double_map_to_json(visit.structural_volumes)},
              {"lab_values", labs},
              {"biomarkers", double_map_to_json(visit.biomarkers)},
              {"cognitive_scores", double_map_to_json(visit.cognitive_scores)},
              {"demographics", string_map_to_json(visit.demographics)},
              {"history", string_map_to_json(visit.history)},
              {"genetics", string_map_to_json(visit.genetics)},
              {"gold_label", to_string(visit.gold_label)}};
}

SubjectVisit visit_from_json(const json& doc) {
  if (!doc.is_object()) throw ConfigError("visit", "expected an object");
  SubjectVisit visit;
  try {
    visit.subject_id = doc.at("subject_id").get<std::string>();
    visit.visit_id = doc.at("visit_id").get<std::string>();
    visit.age = doc.at("age").get<double>();
  } catch (const json::exception& e) {
    throw ConfigError("visit", e.what());
  }
  auto sex = parse_sex(doc.value("sex", ""));
  if (!sex) throw ConfigError("sex", "expected \"M\" or \"F\"");
  visit.sex = *sex;
  auto label = parse_diagnosis_label(doc.value("gold_label", ""));
  if (!label) throw ConfigError("gold_label", "expected one of CN, MCI, Dementia");
  visit.gold_label = *label;
  visit.structural_volumes = double_map_from_json(doc, "structural_volumes");
  visit.biomarkers = double_map_from_json(doc, "biomarkers");
  visit.cognitive_scores = double_map_from_json(doc, "cognitive_scores");
  visit.demographics = string_map_from_json(doc, "demographics");
  visit.history = string_map_from_json(doc, "history");
  visit.genetics = string_map_from_json(doc, "genetics");
  if (doc.contains("lab_values")) {
    const json& labs = doc.at("lab_values");
    if (!labs.is_object()) throw ConfigError("lab_values", "expected an object");
    for (const auto& [analyte, entry] : labs.items()) {
      if (!entry.is_object() || !entry.contains("value") || !entry.contains("unit")) {
        throw ConfigError("lab_values", "entry '" + analyte + "' must have value and unit");
      }
      visit.lab_values[analyte] =
          LabValue{entry.at("value").get<double>(), entry.at("unit").get<std::string>()};
    }
  }
  visit.validate();
  return visit;
}

std::string cohort_to_jsonl(const std::vector<SubjectVisit>& cohort) {
  std::string out;
  for (const auto& visit : cohort) {
    out += visit_to_json(visit).dump();
    out += '\n';
  }
  return out;
}

std::vector<SubjectVisit> cohort_from_jsonl(const std::string& text) {
  std::vector<SubjectVisit> cohort;
  std::istringstream stream(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(stream, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json doc;
    try {
      doc = json::parse(line);
    } catch (const json::exception& e) {
      throw ConfigError("line " + std::to_string(line_no), e.what());
    }
    cohort.push_back(visit_from_json(doc));
  }
  return cohort;
}

void save_cohort(const std::string& path, const std::vector<SubjectVisit>& cohort) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError(path, "cannot open for writing");
  out << cohort_to_jsonl(cohort);
  if (!out) throw ConfigError(path, "write failed");
}

std::vector<SubjectVisit> load_cohort(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path, "cannot open for reading");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return cohort_from_jsonl(buffer.str());
}

// ---------------------------------------------------------------------------
// Reference ranges
// ---------------------------------------------------------------------------

void ReferenceRange::validate() const {
  if (analyte.empty()) throw ConfigError("analyte", "must be non-empty");
  if (!std::isfinite(lower) || !std::isfinite(upper)) {
    throw ConfigError(analyte, "range bounds must be finite");
  }
  if (!(lower < upper)) throw ConfigError(analyte, "lower bound must be below upper bound");
  if (unit.empty()) throw ConfigError(analyte, "unit must be non-empty");
}

ReferenceRanges ranges_from_json(const json& doc) {
  if (!doc.is_object() || !doc.contains("reference_ranges")) {
    throw ConfigError("reference_ranges", "missing object");
  }
  ReferenceRanges out;
  for (const auto& [analyte, entry] : doc.at("reference_ranges").items()) {
    ReferenceRange range;
    range.analyte = analyte;
    try {
      range.lower = entry.at("lower").get<double>();
      range.upper = entry.at("upper").get<double>();
      range.unit = entry.at("unit").get<std::string>();
    } catch (const json::exception& e) {
      throw ConfigError("reference_ranges." + analyte, e.what());
    }
    range.validate();
    out[analyte] = std::move(range);
  }
  return out;
}

json ranges_to_json(const ReferenceRanges& ranges) {
  json obj = json::object();
  for (const auto& [analyte, range] : ranges) {
    obj[analyte] = json{{"lower", range.lower}, {"upper", range.upper}, {"unit", range.unit}};
  }
  return json{{"schema_version", 1}, {"reference_ranges", obj}};
}

// ---------------------------------------------------------------------------
// Norm table
// ---------------------------------------------------------------------------

NormTable::NormTable(std::vector<NormBand> bands) : bands_(std::move(bands)) { validate(); }

void NormTable::validate() const {
  std::map<std::pair<std::string, Sex>, std::vector<const NormBand*>> grouped;
  for (const auto& band : bands_) {
    if (band.measurement.empty()) throw ConfigError("norms", "measurement name must be non-empty");
    if (!(band.entry.stddev > 0.0)) {
      throw ConfigError(band.measurement, "norm std must be positive");
    }
    if (!std::isfinite(band.entry.mean) || !std::isfinite(band.entry.stddev)) {
      throw ConfigError(band.measurement, "norm parameters must be finite");
    }
    if (band.age_lo >= band.age_hi) {
      throw ConfigError(band.measurement, "age band bounds must satisfy lo < hi");
    }
    grouped[{band.measurement, band.sex}].push_back(&band);
  }
  for (auto& [key, group] : grouped) {
    std::sort(group.begin(), group.end(),
              [](const NormBand* a, const NormBand* b) { return a->age_lo < b->age_lo; });
    if (group.front()->age_lo > 18 || group.back()->age_hi < 110) {
      throw ConfigError(key.first, "age bands must cover 18 through 110");
    }
    for (std::size_t i = 1; i < group.size(); ++i) {
      if (group[i]->age_lo != group[i - 1]->age_hi + 1) {
        throw ConfigError(key.first, "age bands must be contiguous and non-overlapping");
      }
    }
  }
}

std::optional<NormEntry> NormTable::lookup(std::string_view measurement, double age,
                                           Sex sex) const {
  for (const auto& band : bands_) {
    if (band.measurement != measurement || band.sex != sex) continue;
    // Bands are stored with integer bounds like 30-39; a band owns ages in
    // [lo, hi+1) so fractional ages between hi and the next lo resolve.
    if (age >= band.age_lo && age < band.age_hi + 1) return band.entry;
  }
  return std::nullopt;
}

NormTable NormTable::from_json(const json& doc) {
  if (!doc.is_object() || !doc.contains("norms")) throw ConfigError("norms", "missing array");
  if (doc.value("schema_version", 0) != 1) {
    throw ConfigError("schema_version", "expected 1");
  }
  const json& arr = doc.at("norms");
  if (!arr.is_array()) throw ConfigError("norms", "expected an array");
  std::vector<NormBand> bands;
  for (const auto& entry : arr) {
    NormBand band;
    try {
      band.measurement = entry.at("measurement").get<std::string>();
      band.age_lo = entry.at("age_lo").get<int>();
      band.age_hi = entry.at("age_hi").get<int>();
      band.entry.mean = entry.at("mean").get<double>();
      band.entry.stddev = entry.at("std").get<double>();
    } catch (const json::exception& e) {
      throw ConfigError("norms", e.what());
    }
    auto sex = parse_sex(entry.value("sex", ""));
    if (!sex) throw ConfigError("norms", "sex must be \"M\" or \"F\"");
    band.sex = *sex;
    bands.push_back(std::move(band));
  }
  return NormTable(std::move(bands));
}

json NormTable::to_json() const {
  json arr = json::array();
  for (const auto& band : bands_) {
    arr.push_back(json{{"measurement", band.measurement},
                       {"sex", to_string(band.sex)},
                       {"age_lo", band.age_lo},
                       {"age_hi", band.age_hi},
                       {"mean", band.entry.mean},
                       {"std", band.entry.stddev}});
  }
  return json{{"schema_version", 1}, {"norms", arr}};
}

// ---------------------------------------------------------------------------
// Synthetic cohort
// ---------------------------------------------------------------------------

namespace {

struct LabelSpec {
  double hippo_z_mean, hippo_z_std;
  double vent_z_mean, vent_z_std;
  double mmse_mean, mmse_std;
  double abeta_mean, abeta_std;
  double ttau_mean, ttau_std;
  double ptau_mean, ptau_std;
  double apoe_weights[3];
  double memory_complaint_p;
};

const LabelSpec& spec_for(DiagnosisLabel label) {
  static const LabelSpec cn{0.0,  0.7, 0.0, 0.7, 28.5, 1.0,  1250.0, 180.0,
                            180.0, 50.0, 17.0, 4.0, {0.70, 0.25, 0.05}, 0.10};
  static const LabelSpec mci{-1.3, 0.5, 1.0, 0.5, 26.0, 1.5,  820.0, 160.0,
                             320.0, 80.0, 31.0, 7.0, {0.55, 0.35, 0.10}, 0.75};
  static const LabelSpec dem{-2.4, 0.6, 2.0, 0.6, 19.0, 3.0,  620.0, 140.0,
                             420.0, 90.0, 42.0, 8.0, {0.40, 0.40, 0.20}, 0.95};
  switch (label) {
    case DiagnosisLabel::CN: return cn;
    case DiagnosisLabel::MCI: return mci;
    case DiagnosisLabel::Dementia: return dem;
  }
  throw std::logic_error("unhandled DiagnosisLabel");
}

std::vector<DiagnosisLabel> stratified_labels(int n, Rng& rng) {
  // Target mix 40/35/25. Floors first, remainders by largest fraction, then
  // every class is guaranteed a slot once n admits it.
  const double weights[3] = {0.40, 0.35, 0.25};
  int counts[3];
  double fractional[3];
  int assigned = 0;
  for (int i = 0; i < 3; ++i) {
    double exact = weights[i] * n;
    counts[i] = static_cast<int>(exact);
    fractional[i] = exact - counts[i];
    assigned += counts[i];
  }
  while (assigned < n) {
    int best = 0;
    for (int i = 1; i < 3; ++i) {
      if (fractional[i] > fractional[best]) best = i;
    }
    ++counts[best];
    fractional[best] = -1.0;
    ++assigned;
  }
  if (n >= 3) {
    for (int i = 0; i < 3; ++i) {
      while (counts[i] == 0) {
        int donor = 0;
        for (int j = 1; j < 3; ++j) {
          if (counts[j] > counts[donor]) donor = j;
        }
        --counts[donor];
        ++counts[i];
      }
    }
  }
  std::vector<DiagnosisLabel> labels;
  labels.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < counts[0]; ++i) labels.push_back(DiagnosisLabel::CN);
  for (int i = 0; i < counts[1]; ++i) labels.push_back(DiagnosisLabel::MCI);
  for (int i = 0; i < counts[2]; ++i) labels.push_back(DiagnosisLabel::Dementia);
  rng.shuffle(labels);
  return labels;
}

std::string format_id(const char* prefix, int index, int width) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s%0*d", prefix, width, index);
  return buf;
}

double clamp(double v, double lo, double hi) { return std::min(hi, std::max(lo, v)); }

double from_norm(const NormTable& norms, const std::string& measurement, double age, Sex sex,
                 double z) {
  auto entry = norms.lookup(measurement, age, sex);
  if (!entry) throw std::logic_error("builtin norms missing " + measurement);
  return entry->mean + z * entry->stddev;
}

}  // namespace

std::vector<SubjectVisit> generate_synthetic_cohort(std::uint64_t seed, int n_subjects,
                                                    int visits_min, int visits_max) {
  if (n_subjects < 1) throw std::invalid_argument("n_subjects must be at least 1");
  if (visits_min < 1 || visits_min > visits_max) {
    throw std::invalid_argument("visit range must satisfy 1 <= visits_min <= visits_max");
  }
  Rng rng(seed);
  NormTable norms = builtin_norm_table();
  std::vector<DiagnosisLabel> labels = stratified_labels(n_subjects, rng);

  std::vector<SubjectVisit> cohort;
  for (int s = 0; s < n_subjects; ++s) {
    DiagnosisLabel label = labels[static_cast<std::size_t>(s)];
    const LabelSpec& spec = spec_for(label);
    std::string subject_id = format_id("S", s + 1, 4);
    Sex sex = rng.bernoulli(0.5) ? Sex::F : Sex::M;
    double base_age = rng.uniform(58.0, 88.0);
    std::string apoe = std::to_string(
        rng.categorical({spec.apoe_weights[0], spec.apoe_weights[1], spec.apoe_weights[2]}));
    bool has_genetics = !rng.bernoulli(0.05);
    bool has_history = !rng.bernoulli(0.05);
    bool memory_complaints = rng.bernoulli(spec.memory_complaint_p);
    int education_years = rng.uniform_int(8, 20);
    int n_visits = rng.uniform_int(visits_min, visits_max);

    double age = base_age;
    for (int v = 0; v < n_visits; ++v) {
      SubjectVisit visit;
      visit.subject_id = subject_id;
      visit.visit_id = format_id("v", v + 1, 2);
      visit.age = clamp(std::round(age * 10.0) / 10.0, 18.0, 110.0);
      visit.sex = sex;
      visit.gold_label = label;

      double hippo_z = rng.normal(spec.hippo_z_mean, spec.hippo_z_std);
      double vent_z = rng.normal(spec.vent_z_mean, spec.vent_z_std);
      visit.structural_volumes["hippocampus"] =
          std::max(100.0, from_norm(norms, "hippocampus", visit.age, sex, hippo_z));
      visit.structural_volumes["ventricles"] =
          std::max(1000.0, from_norm(norms, "ventricles", visit.age, sex, vent_z));

      bool has_labs = !rng.bernoulli(0.08);
      double glucose_z = rng.normal(0.0, 1.2);
      double creatinine_z = rng.normal(0.0, 1.2);
      double tsh_z = rng.normal(0.0, 1.2);
      double b12_z = rng.normal(0.0, 1.2);
      if (has_labs) {
        visit.lab_values["glucose"] =
            LabValue{from_norm(norms, "glucose", visit.age, sex, glucose_z), "mg/dL"};
        visit.lab_values["creatinine"] = LabValue{
            std::max(0.2, from_norm(norms, "creatinine", visit.age, sex, creatinine_z)), "mg/dL"};
        visit.lab_values["tsh"] =
            LabValue{std::max(0.05, from_norm(norms, "tsh", visit.age, sex, tsh_z)), "mIU/L"};
        visit.lab_values["vitamin_b12"] = LabValue{
            std::max(50.0, from_norm(norms, "vitamin_b12", visit.age, sex, b12_z)), "pg/mL"};
      }

      visit.biomarkers["Abeta"] = std::max(50.0, rng.normal(spec.abeta_mean, spec.abeta_std));
      visit.biomarkers["tTau"] = std::max(20.0, rng.normal(spec.ttau_mean, spec.ttau_std));
      visit.biomarkers["pTau"] = std::max(2.0, rng.normal(spec.ptau_mean, spec.ptau_std));

      visit.cognitive_scores["MMSE"] =
          std::round(clamp(rng.normal(spec.mmse_mean, spec.mmse_std), 0.0, 30.0));

      visit.demographics["education_years"] = std::to_string(education_years);
      if (has_history) {
        visit.history["memory_complaints"] = memory_complaints ? "yes" : "no";
        visit.history["hypertension"] = rng.bernoulli(0.35) ? "yes" : "no";
      } else {
        rng.bernoulli(0.35);  // keep the draw sequence aligned across subjects
      }
      if (has_genetics) visit.genetics["APOE-e4"] = apoe;

      visit.validate();
      cohort.push_back(std::move(visit));
      age += rng.uniform(0.5, 1.5);
    }
  }
  return cohort;
}

CohortSplit split_subject_wise(const std::vector<SubjectVisit>& cohort, double train_fraction,
                               double val_fraction, double test_fraction, std::uint64_t seed) {
  const double fractions[3] = {train_fraction, val_fraction, test_fraction};
  for (double f : fractions) {
    if (!std::isfinite(f) || f < 0.0) throw std::invalid_argument("fractions must be >= 0");
  }
  if (std::abs(train_fraction + val_fraction + test_fraction - 1.0) > 1e-9) {
    throw std::invalid_argument("fractions must sum to 1");
  }

  std::vector<std::string> subjects;
  for (const auto& visit : cohort) {
    if (std::find(subjects.begin(), subjects.end(), visit.subject_id) == subjects.end()) {
      subjects.push_back(visit.subject_id);
    }
  }
  Rng rng(seed);
  rng.shuffle(subjects);

  const int n = static_cast<int>(subjects.size());
  int counts[3];
  double fractional[3];
  int assigned = 0;
  for (int i = 0; i < 3; ++i) {
    double exact = fractions[i] * n;
    counts[i] = static_cast<int>(exact);
    fractional[i] = exact - counts[i];
    assigned += counts[i];
  }
  while (assigned < n) {
    int best = 0;
    for (int i = 1; i < 3; ++i) {
      if (fractional[i] > fractional[best]) best = i;
    }
    ++counts[best];
    fractional[best] = -1.0;
    ++assigned;
  }

  std::map<std::string, int> part_of;
  int cursor = 0;
  for (int part = 0; part < 3; ++part) {
    for (int i = 0; i < counts[part]; ++i) part_of[subjects[static_cast<std::size_t>(cursor++)]] = part;
  }

  CohortSplit split;
  for (const auto& visit : cohort) {
    switch (part_of.at(visit.subject_id)) {
      case 0: split.train.push_back(visit); break;
      case 1: split.val.push_back(visit); break;
      default: split.test.push_back(visit); break;
    }
  }
  return split;
}

}  // namespace advr
