#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace advr {

// ---------------------------------------------------------------------------
// Labels and tasks
// ---------------------------------------------------------------------------

enum class DiagnosisLabel { CN, MCI, Dementia };

inline constexpr DiagnosisLabel kAllLabels[] = {DiagnosisLabel::CN, DiagnosisLabel::MCI,
                                                DiagnosisLabel::Dementia};

std::string to_string(DiagnosisLabel label);
std::optional<DiagnosisLabel> parse_diagnosis_label(std::string_view token);

enum class Sex { M, F };
std::string to_string(Sex sex);
std::optional<Sex> parse_sex(std::string_view token);

// The two clinical classification tasks. CN_vs_CI pools MCI and Dementia as
// the impaired class; CN_vs_MCI excludes Dementia visits entirely.
enum class BinaryTask { CN_vs_CI, CN_vs_MCI };
std::string to_string(BinaryTask task);
std::optional<BinaryTask> parse_binary_task(std::string_view token);

enum class BinaryClass { Negative, Positive };

// Total over (task, label); nullopt marks a visit the task excludes.
// CN never maps to Positive.
std::optional<BinaryClass> binarize_label(BinaryTask task, DiagnosisLabel label);

// ---------------------------------------------------------------------------
// Subject visits
// ---------------------------------------------------------------------------

struct LabValue {
  double value = 0.0;
  std::string unit;
};

// One subject-visit's raw multimodal measurements plus the gold label.
// Empty maps are legal: a missing modality is simply absent and the report
// marks the section as not available.
struct SubjectVisit {
  std::string subject_id;
  std::string visit_id;
  double age = 0.0;  // years, 18-110
  Sex sex = Sex::M;
  std::map<std::string, double> structural_volumes;  // region -> mm^3
  std::map<std::string, LabValue> lab_values;        // analyte -> value+unit
  std::map<std::string, double> biomarkers;          // Abeta/tTau/pTau -> pg/mL
  std::map<std::string, double> cognitive_scores;    // test -> score
  std::map<std::string, std::string> demographics;
  std::map<std::string, std::string> history;
  std::map<std::string, std::string> genetics;  // e.g. "APOE-e4" -> "0".."2"
  DiagnosisLabel gold_label = DiagnosisLabel::CN;

  // Throws std::invalid_argument naming the violated invariant: finite
  // numerics, age in range, MMSE in [0,30], APOE-e4 in {0,1,2}.
  void validate() const;
};

nlohmann::json visit_to_json(const SubjectVisit& visit);
SubjectVisit visit_from_json(const nlohmann::json& doc);

// Line-delimited persistence: one visit object per line, UTF-8.
std::string cohort_to_jsonl(const std::vector<SubjectVisit>& cohort);
std::vector<SubjectVisit> cohort_from_jsonl(const std::string& text);
void save_cohort(const std::string& path, const std::vector<SubjectVisit>& cohort);
std::vector<SubjectVisit> load_cohort(const std::string& path);

// ---------------------------------------------------------------------------
// Reference ranges
// ---------------------------------------------------------------------------

struct ReferenceRange {
  std::string analyte;
  double lower = 0.0;
  double upper = 0.0;  // must exceed lower
  std::string unit;    // non-empty

  void validate() const;
};

using ReferenceRanges = std::map<std::string, ReferenceRange>;

ReferenceRanges ranges_from_json(const nlohmann::json& doc);
nlohmann::json ranges_to_json(const ReferenceRanges& ranges);

// ---------------------------------------------------------------------------
// Population norms
// ---------------------------------------------------------------------------

struct NormEntry {
  double mean = 0.0;
  double stddev = 0.0;  // strictly positive
};

struct NormBand {
  std::string measurement;
  Sex sex = Sex::M;
  int age_lo = 0;  // inclusive decade bounds, e.g. 18-29
  int age_hi = 0;
  NormEntry entry;
};

// (measurement, age band, sex) -> (mean, std). Bands for each
// (measurement, sex) pair must be non-overlapping and cover 18-110.
class NormTable {
 public:
  NormTable() = default;
  explicit NormTable(std::vector<NormBand> bands);

  // Band containing `age`: lo <= age < hi+1 (the final band also admits its
  // upper edge so age 110 resolves).
  std::optional<NormEntry> lookup(std::string_view measurement, double age, Sex sex) const;

  const std::vector<NormBand>& bands() const { return bands_; }

  static NormTable from_json(const nlohmann::json& doc);
  nlohmann::json to_json() const;

 private:
  void validate() const;
  std::vector<NormBand> bands_;
};

// ---------------------------------------------------------------------------
// Synthetic cohort
// ---------------------------------------------------------------------------

// Stand-in for access-restricted cohort data. Deterministic in (seed, args):
// same inputs reproduce the cohort byte-for-byte. Labels cover all three
// classes (n_subjects >= 3) and measurements are drawn so label-consistent
// patterns exist, e.g. Dementia visits get lower hippocampal volumes and
// abnormal CSF profiles on average.
std::vector<SubjectVisit> generate_synthetic_cohort(std::uint64_t seed, int n_subjects,
                                                    int visits_min = 1, int visits_max = 1);

struct CohortSplit {
  std::vector<SubjectVisit> train;
  std::vector<SubjectVisit> val;
  std::vector<SubjectVisit> test;
};

// Subject-wise split: every visit of a subject lands in the same part.
// Fractions must sum to 1 within 1e-9.
CohortSplit split_subject_wise(const std::vector<SubjectVisit>& cohort, double train_fraction,
                               double val_fraction, double test_fraction, std::uint64_t seed);

}  // namespace advr
