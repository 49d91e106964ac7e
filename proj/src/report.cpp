#include "advr/report.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace advr {

std::string format_fixed(double value, int decimals) {
  std::array<char, 64> buf;
  auto [ptr, ec] =
      std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::fixed, decimals);
  if (ec != std::errc{}) throw std::invalid_argument("value not representable");
  return std::string(buf.data(), ptr);
}

double compute_zscore(double value, const NormEntry& norm) {
  if (!std::isfinite(value)) throw std::invalid_argument("value must be finite");
  if (!(norm.stddev > 0.0)) throw std::invalid_argument("norm std must be positive");
  return (value - norm.mean) / norm.stddev;
}

Severity describe_atrophy(double z) {
  if (!std::isfinite(z)) throw std::invalid_argument("z must be finite");
  double a = std::abs(z);
  if (a < 1.0) return Severity::None;
  if (a < 1.5) return Severity::Mild;
  if (a < 2.0) return Severity::Moderate;
  if (a < 3.0) return Severity::Significant;
  return Severity::Profound;
}

std::string severity_word(Severity severity) {
  switch (severity) {
    case Severity::None: return "none";
    case Severity::Mild: return "mild";
    case Severity::Moderate: return "moderate";
    case Severity::Significant: return "significant";
    case Severity::Profound: return "profound";
  }
  throw std::logic_error("unhandled Severity");
}

BiomarkerStatus classify_biomarker(double value, const ReferenceRange& range) {
  if (!std::isfinite(value)) throw std::invalid_argument("value must be finite");
  return (value >= range.lower && value <= range.upper) ? BiomarkerStatus::Normal
                                                        : BiomarkerStatus::Abnormal;
}

std::string biomarker_display_name(std::string_view name) {
  if (name == "Abeta") return "Amyloid beta";
  if (name == "tTau") return "Total tau";
  if (name == "pTau") return "Phosphorylated tau";
  return std::string(name);
}

std::string interpret_biomarker(std::string_view name, double value, const ReferenceRange& range) {
  BiomarkerStatus status = classify_biomarker(value, range);
  std::string out = biomarker_display_name(name);
  out += ": ";
  out += format_fixed(value);
  out += ' ';
  out += range.unit;
  out += status == BiomarkerStatus::Normal ? " (normal)" : " (abnormal)";
  return out;
}

namespace {

constexpr const char* kNotAvailable = "Not available.";
constexpr const char* kNoLabFindings = "No clinically significant laboratory abnormalities.";

// "vitamin_b12" -> "Vitamin b12"
std::string prettify_key(std::string_view key) {
  std::string out(key);
  for (char& c : out) {
    if (c == '_') c = ' ';
  }
  if (!out.empty() && out[0] >= 'a' && out[0] <= 'z') out[0] = static_cast<char>(out[0] - 32);
  return out;
}

std::string imaging_section(const SubjectVisit& visit, const NormTable& norms) {
  if (visit.structural_volumes.empty()) return kNotAvailable;
  std::string out;
  for (const auto& [region, volume] : visit.structural_volumes) {
    std::string sentence = prettify_key(region) + " volume " + format_fixed(volume) + " mm3";
    auto norm = norms.lookup(region, visit.age, visit.sex);
    if (!norm) {
      sentence += " was recorded.";
    } else {
      double z = compute_zscore(volume, *norm);
      if (z <= -1.0) {
        sentence += " shows " + severity_word(describe_atrophy(z)) + " atrophy.";
      } else if (z >= 1.0) {
        sentence += " shows " + severity_word(describe_atrophy(z)) + " enlargement.";
      } else {
        sentence += " is within normal limits.";
      }
    }
    if (!out.empty()) out += '\n';
    out += sentence;
  }
  return out;
}

std::string demographics_section(const SubjectVisit& visit) {
  std::string out = "Age: " + format_fixed(visit.age, 1) + " years. Sex: " +
                    to_string(visit.sex) + ".";
  for (const auto& [key, value] : visit.demographics) {
    out += "\n" + prettify_key(key) + ": " + value + ".";
  }
  return out;
}

std::string key_value_section(const std::map<std::string, std::string>& entries) {
  if (entries.empty()) return kNotAvailable;
  std::string out;
  for (const auto& [key, value] : entries) {
    if (!out.empty()) out += '\n';
    out += prettify_key(key) + ": " + value + ".";
  }
  return out;
}

std::string format_score(double score) {
  if (score == std::floor(score) && std::abs(score) < 1e9) {
    return std::to_string(static_cast<long long>(score));
  }
  return format_fixed(score);
}

std::string cognitive_section(const SubjectVisit& visit) {
  if (visit.cognitive_scores.empty()) return kNotAvailable;
  std::string out;
  for (const auto& [test, score] : visit.cognitive_scores) {
    if (!out.empty()) out += '\n';
    if (test == "MMSE") {
      out += "MMSE score is " + format_score(score) + " of 30.";
    } else {
      out += test + " score is " + format_score(score) + ".";
    }
  }
  return out;
}

std::string biomarker_section(const SubjectVisit& visit, const ReferenceRanges& ranges) {
  if (visit.biomarkers.empty()) return kNotAvailable;
  // Clinical convention orders the CSF panel amyloid first, then tau.
  static const char* kOrder[] = {"Abeta", "tTau", "pTau"};
  std::string out;
  auto append = [&](const std::string& name, double value) {
    auto range = ranges.find(name);
    if (range == ranges.end()) return;  // no interpretation without a range
    if (!out.empty()) out += '\n';
    out += interpret_biomarker(name, value, range->second) + ".";
  };
  for (const char* name : kOrder) {
    auto it = visit.biomarkers.find(name);
    if (it != visit.biomarkers.end()) append(it->first, it->second);
  }
  for (const auto& [name, value] : visit.biomarkers) {
    if (name != "Abeta" && name != "tTau" && name != "pTau") append(name, value);
  }
  return out.empty() ? kNotAvailable : out;
}

}  // namespace

std::string synthesize_lab_section(const std::map<std::string, LabValue>& labs,
                                   const NormTable& norms, double age, Sex sex) {
  std::string out;
  for (const auto& [analyte, lab] : labs) {
    auto norm = norms.lookup(analyte, age, sex);
    if (!norm) continue;
    double z = compute_zscore(lab.value, *norm);
    if (std::abs(z) <= 2.0) continue;
    if (!out.empty()) out += '\n';
    out += prettify_key(analyte) + " is " + (z > 2.0 ? "elevated" : "reduced") + " at " +
           format_fixed(lab.value) + " " + lab.unit + ".";
  }
  return out.empty() ? kNoLabFindings : out;
}

std::string ClinicalReport::render() const {
  std::string out;
  for (const auto& [name, text] : sections) {
    if (!out.empty()) out += '\n';
    out += name + ":\n" + text + "\n";
  }
  return out;
}

nlohmann::json report_to_json(const ClinicalReport& report) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& [name, text] : report.sections) {
    arr.push_back(nlohmann::json{{"name", name}, {"text", text}});
  }
  return nlohmann::json{
      {"subject_id", report.subject_id}, {"visit_id", report.visit_id}, {"sections", arr}};
}

ClinicalReport synthesize_visit_report(const SubjectVisit& visit, const NormTable& norms,
                                       const ReferenceRanges& ranges) {
  visit.validate();
  ClinicalReport report;
  report.subject_id = visit.subject_id;
  report.visit_id = visit.visit_id;
  report.sections.emplace_back("Imaging", imaging_section(visit, norms));
  report.sections.emplace_back("Demographics", demographics_section(visit));
  report.sections.emplace_back("History", key_value_section(visit.history));
  report.sections.emplace_back("Cognitive", cognitive_section(visit));
  report.sections.emplace_back("Laboratory",
                               synthesize_lab_section(visit.lab_values, norms, visit.age, visit.sex));
  report.sections.emplace_back("Genetics", key_value_section(visit.genetics));
  report.sections.emplace_back("CSF Biomarkers", biomarker_section(visit, ranges));
  return report;
}

}  // namespace advr
