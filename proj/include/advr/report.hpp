#pragma once

#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "advr/domain.hpp"

namespace advr {

// Fixed-point rendering with 2 decimals, locale-independent ("858.30").
std::string format_fixed(double value, int decimals = 2);

// z = (value - mean) / std. Throws std::invalid_argument on std <= 0 or
// non-finite value.
double compute_zscore(double value, const NormEntry& norm);

enum class Severity { None, Mild, Moderate, Significant, Profound };

// Left-closed buckets over |z|: None <1, Mild [1,1.5), Moderate [1.5,2),
// Significant [2,3), Profound >=3.
Severity describe_atrophy(double z);
std::string severity_word(Severity severity);  // lowercase, as used in prose

enum class BiomarkerStatus { Normal, Abnormal };

// Closed interval: a value equal to either bound is normal.
BiomarkerStatus classify_biomarker(double value, const ReferenceRange& range);

// "Abeta" -> "Amyloid beta", "tTau" -> "Total tau", "pTau" ->
// "Phosphorylated tau"; unknown names pass through unchanged.
std::string biomarker_display_name(std::string_view name);

// "<Name>: <value 2dp> <unit> (<status>)", e.g.
// "Amyloid beta: 858.30 pg/mL (normal)".
std::string interpret_biomarker(std::string_view name, double value, const ReferenceRange& range);

// One sentence per analyte with |z| > 2.0 stating direction and value;
// in-range analytes and analytes without norm coverage are omitted. Empty
// result text is replaced by a fixed vacuous sentence.
std::string synthesize_lab_section(const std::map<std::string, LabValue>& labs,
                                   const NormTable& norms, double age, Sex sex);

struct ClinicalReport {
  std::string subject_id;
  std::string visit_id;
  // Fixed order: Imaging, Demographics, History, Cognitive, Laboratory,
  // Genetics, CSF Biomarkers. A section with no source data carries the
  // body "Not available.".
  std::vector<std::pair<std::string, std::string>> sections;

  std::string render() const;
};

nlohmann::json report_to_json(const ClinicalReport& report);

// Deterministic: identical inputs yield byte-identical reports.
ClinicalReport synthesize_visit_report(const SubjectVisit& visit, const NormTable& norms,
                                       const ReferenceRanges& ranges);

}  // namespace advr
