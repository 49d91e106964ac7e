#include <cmath>
#include <stdexcept>

#include <doctest.h>
#include <nlohmann/json.hpp>

#include "advr/builtin_data.hpp"
#include "advr/report.hpp"

using namespace advr;

TEST_CASE("fixed-point formatting is locale-free and exact") {
  CHECK(format_fixed(858.3) == "858.30");
  CHECK(format_fixed(5300.0) == "5300.00");
  CHECK(format_fixed(0.055) == "0.06");
  CHECK(format_fixed(-1.5) == "-1.50");
  CHECK(format_fixed(72.4, 1) == "72.4");
  CHECK(format_fixed(0.0) == "0.00");
}

TEST_CASE("z-score basics") {
  NormEntry norm{100.0, 10.0};
  CHECK(compute_zscore(120.0, norm) == 2.0);
  CHECK(compute_zscore(85.0, norm) == -1.5);
  CHECK_THROWS_AS(compute_zscore(100.0, NormEntry{100.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(compute_zscore(std::numeric_limits<double>::infinity(), norm),
                  std::invalid_argument);
}

TEST_CASE("severity buckets are left-closed at every boundary") {
  struct Case {
    double z;
    Severity expected;
  };
  const Case cases[] = {
      {0.0, Severity::None},        {0.999, Severity::None},
      {1.0, Severity::Mild},        {-1.0, Severity::Mild},
      {1.499, Severity::Mild},      {1.5, Severity::Moderate},
      {-1.5, Severity::Moderate},   {1.999, Severity::Moderate},
      {2.0, Severity::Significant}, {-2.0, Severity::Significant},
      {2.999, Severity::Significant}, {3.0, Severity::Profound},
      {-3.0, Severity::Profound},   {7.5, Severity::Profound},
  };
  for (const auto& c : cases) {
    CAPTURE(c.z);
    CHECK(describe_atrophy(c.z) == c.expected);
  }
  CHECK(severity_word(Severity::Mild) == "mild");
  CHECK(severity_word(Severity::Significant) == "significant");
  CHECK_THROWS_AS(describe_atrophy(std::numeric_limits<double>::quiet_NaN()),
                  std::invalid_argument);
}

TEST_CASE("biomarker classification treats the range as closed") {
  ReferenceRange range{"Abeta", 800.0, 1700.0, "pg/mL"};
  CHECK(classify_biomarker(800.0, range) == BiomarkerStatus::Normal);
  CHECK(classify_biomarker(1700.0, range) == BiomarkerStatus::Normal);
  CHECK(classify_biomarker(1200.0, range) == BiomarkerStatus::Normal);
  CHECK(classify_biomarker(799.999, range) == BiomarkerStatus::Abnormal);
  CHECK(classify_biomarker(1700.001, range) == BiomarkerStatus::Abnormal);
}

TEST_CASE("biomarker line matches the documented example byte for byte") {
  ReferenceRange range{"Abeta", 800.0, 1700.0, "pg/mL"};
  CHECK(interpret_biomarker("Abeta", 858.30, range) == "Amyloid beta: 858.30 pg/mL (normal)");
  CHECK(interpret_biomarker("tTau", 402.0, ReferenceRange{"tTau", 80.0, 300.0, "pg/mL"}) ==
        "Total tau: 402.00 pg/mL (abnormal)");
  CHECK(biomarker_display_name("pTau") == "Phosphorylated tau");
  CHECK(biomarker_display_name("NfL") == "NfL");
}

TEST_CASE("lab section includes only strict two-sigma outliers") {
  std::vector<NormBand> bands{NormBand{"glucose", Sex::M, 18, 110, NormEntry{100.0, 10.0}},
                              NormBand{"sodium", Sex::M, 18, 110, NormEntry{140.0, 2.0}}};
  NormTable norms(bands);

  std::map<std::string, LabValue> labs;
  labs["glucose"] = LabValue{120.0, "mg/dL"};  // z = 2.0 exactly: excluded
  CHECK(synthesize_lab_section(labs, norms, 70.0, Sex::M) ==
        "No clinically significant laboratory abnormalities.");

  labs["glucose"] = LabValue{121.0, "mg/dL"};  // z = 2.1: included
  CHECK(synthesize_lab_section(labs, norms, 70.0, Sex::M) ==
        "Glucose is elevated at 121.00 mg/dL.");

  labs["glucose"] = LabValue{75.0, "mg/dL"};  // z = -2.5
  CHECK(synthesize_lab_section(labs, norms, 70.0, Sex::M) ==
        "Glucose is reduced at 75.00 mg/dL.");

  // Analytes without norm coverage are skipped, not reported.
  labs.clear();
  labs["troponin"] = LabValue{99.0, "ng/L"};
  CHECK(synthesize_lab_section(labs, norms, 70.0, Sex::M) ==
        "No clinically significant laboratory abnormalities.");
}

namespace {

SubjectVisit report_fixture() {
  SubjectVisit visit;
  visit.subject_id = "S0042";
  visit.visit_id = "v02";
  visit.age = 72.4;
  visit.sex = Sex::M;
  visit.gold_label = DiagnosisLabel::Dementia;
  visit.structural_volumes = {{"hippocampus", 5300.0}};
  visit.cognitive_scores = {{"MMSE", 22.0}};
  visit.biomarkers = {{"Abeta", 858.30}};
  return visit;
}

}  // namespace

TEST_CASE("report carries the seven fixed sections in order") {
  std::vector<NormBand> bands{
      NormBand{"hippocampus", Sex::M, 18, 110, NormEntry{6100.0, 350.0}}};
  NormTable norms(bands);
  ReferenceRanges ranges = builtin_reference_ranges();

  ClinicalReport report = synthesize_visit_report(report_fixture(), norms, ranges);
  REQUIRE(report.sections.size() == 7);
  CHECK(report.sections[0].first == "Imaging");
  CHECK(report.sections[1].first == "Demographics");
  CHECK(report.sections[2].first == "History");
  CHECK(report.sections[3].first == "Cognitive");
  CHECK(report.sections[4].first == "Laboratory");
  CHECK(report.sections[5].first == "Genetics");
  CHECK(report.sections[6].first == "CSF Biomarkers");

  // z = (5300 - 6100) / 350 = -2.2857: significant atrophy.
  CHECK(report.sections[0].second == "Hippocampus volume 5300.00 mm3 shows significant atrophy.");
  CHECK(report.sections[1].second == "Age: 72.4 years. Sex: M.");
  CHECK(report.sections[2].second == "Not available.");
  CHECK(report.sections[3].second == "MMSE score is 22 of 30.");
  CHECK(report.sections[4].second == "No clinically significant laboratory abnormalities.");
  CHECK(report.sections[5].second == "Not available.");
  CHECK(report.sections[6].second == "Amyloid beta: 858.30 pg/mL (normal).");
}

TEST_CASE("rendering is deterministic and shaped as name-colon blocks") {
  std::vector<NormBand> bands{
      NormBand{"hippocampus", Sex::M, 18, 110, NormEntry{6100.0, 350.0}}};
  NormTable norms(bands);
  ReferenceRanges ranges = builtin_reference_ranges();
  SubjectVisit visit = report_fixture();

  ClinicalReport a = synthesize_visit_report(visit, norms, ranges);
  ClinicalReport b = synthesize_visit_report(visit, norms, ranges);
  CHECK(a.render() == b.render());
  CHECK(a.render().substr(0, 9) == "Imaging:\n");
  CHECK(a.render().find("CSF Biomarkers:\nAmyloid beta: 858.30 pg/mL (normal).") !=
        std::string::npos);

  nlohmann::json doc = report_to_json(a);
  CHECK(doc["subject_id"] == "S0042");
  CHECK(doc["visit_id"] == "v02");
  CHECK(doc["sections"].size() == 7);
  CHECK(doc["sections"][0]["name"] == "Imaging");
}

TEST_CASE("regions without norm coverage are recorded without judgment") {
  NormTable norms{std::vector<NormBand>{
      NormBand{"hippocampus", Sex::M, 18, 110, NormEntry{6100.0, 350.0}}}};
  SubjectVisit visit = report_fixture();
  visit.structural_volumes["amygdala"] = 1500.0;
  ClinicalReport report = synthesize_visit_report(visit, norms, builtin_reference_ranges());
  CHECK(report.sections[0].second.find("Amygdala volume 1500.00 mm3 was recorded.") !=
        std::string::npos);
}

TEST_CASE("biomarkers without a reference range fall out of the panel") {
  NormTable norms{std::vector<NormBand>{
      NormBand{"hippocampus", Sex::M, 18, 110, NormEntry{6100.0, 350.0}}}};
  SubjectVisit visit = report_fixture();
  visit.biomarkers = {{"NfL", 12.0}};  // no range entry for NfL
  ClinicalReport report = synthesize_visit_report(visit, norms, builtin_reference_ranges());
  CHECK(report.sections[6].second == "Not available.");
}
