#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

#include <doctest.h>
#include <nlohmann/json.hpp>

#include "advr/domain.hpp"
#include "advr/errors.hpp"

using namespace advr;
using nlohmann::json;

namespace {

SubjectVisit minimal_visit() {
  SubjectVisit visit;
  visit.subject_id = "S0001";
  visit.visit_id = "v01";
  visit.age = 70.0;
  visit.sex = Sex::F;
  visit.gold_label = DiagnosisLabel::MCI;
  return visit;
}

}  // namespace

TEST_CASE("diagnosis labels round-trip through strings") {
  for (DiagnosisLabel label : kAllLabels) {
    CHECK(parse_diagnosis_label(to_string(label)) == label);
  }
  CHECK(to_string(DiagnosisLabel::CN) == "CN");
  CHECK(to_string(DiagnosisLabel::MCI) == "MCI");
  CHECK(to_string(DiagnosisLabel::Dementia) == "Dementia");
  CHECK_FALSE(parse_diagnosis_label("cn").has_value());
  CHECK_FALSE(parse_diagnosis_label("AD").has_value());
  CHECK_FALSE(parse_diagnosis_label("").has_value());
}

TEST_CASE("sex and task tokens round-trip") {
  CHECK(parse_sex("M") == Sex::M);
  CHECK(parse_sex("F") == Sex::F);
  CHECK_FALSE(parse_sex("male").has_value());
  CHECK(parse_binary_task("CN_vs_CI") == BinaryTask::CN_vs_CI);
  CHECK(parse_binary_task("CN_vs_MCI") == BinaryTask::CN_vs_MCI);
  CHECK_FALSE(parse_binary_task("cn_vs_ci").has_value());
  CHECK(to_string(BinaryTask::CN_vs_CI) == "CN_vs_CI");
}

TEST_CASE("binarization pools or drops the dementia class per task") {
  CHECK(binarize_label(BinaryTask::CN_vs_CI, DiagnosisLabel::CN) == BinaryClass::Negative);
  CHECK(binarize_label(BinaryTask::CN_vs_CI, DiagnosisLabel::MCI) == BinaryClass::Positive);
  CHECK(binarize_label(BinaryTask::CN_vs_CI, DiagnosisLabel::Dementia) == BinaryClass::Positive);
  CHECK(binarize_label(BinaryTask::CN_vs_MCI, DiagnosisLabel::CN) == BinaryClass::Negative);
  CHECK(binarize_label(BinaryTask::CN_vs_MCI, DiagnosisLabel::MCI) == BinaryClass::Positive);
  CHECK_FALSE(binarize_label(BinaryTask::CN_vs_MCI, DiagnosisLabel::Dementia).has_value());
}

TEST_CASE("visit validation names the violated invariant") {
  SubjectVisit visit = minimal_visit();
  CHECK_NOTHROW(visit.validate());

  SUBCASE("age below range") {
    visit.age = 12.0;
    CHECK_THROWS_AS(visit.validate(), std::invalid_argument);
  }
  SUBCASE("age above range") {
    visit.age = 140.0;
    CHECK_THROWS_AS(visit.validate(), std::invalid_argument);
  }
  SUBCASE("empty subject id") {
    visit.subject_id.clear();
    CHECK_THROWS_AS(visit.validate(), std::invalid_argument);
  }
  SUBCASE("empty visit id") {
    visit.visit_id.clear();
    CHECK_THROWS_AS(visit.validate(), std::invalid_argument);
  }
  SUBCASE("non-finite volume") {
    visit.structural_volumes["hippocampus"] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(visit.validate(), std::invalid_argument);
  }
  SUBCASE("MMSE outside 0-30") {
    visit.cognitive_scores["MMSE"] = 31.0;
    CHECK_THROWS_AS(visit.validate(), std::invalid_argument);
  }
  SUBCASE("APOE-e4 outside 0-2") {
    visit.genetics["APOE-e4"] = "3";
    CHECK_THROWS_AS(visit.validate(), std::invalid_argument);
  }
}

TEST_CASE("visit JSON round-trip preserves every field") {
  SubjectVisit visit = minimal_visit();
  visit.structural_volumes = {{"hippocampus", 6200.5}, {"ventricles", 31000.0}};
  visit.lab_values = {{"glucose", LabValue{105.25, "mg/dL"}}};
  visit.biomarkers = {{"Abeta", 850.0}, {"tTau", 310.5}, {"pTau", 30.25}};
  visit.cognitive_scores = {{"MMSE", 27.0}};
  visit.demographics = {{"education_years", "16"}};
  visit.history = {{"hypertension", "yes"}};
  visit.genetics = {{"APOE-e4", "2"}};

  SubjectVisit back = visit_from_json(visit_to_json(visit));
  CHECK(back.subject_id == visit.subject_id);
  CHECK(back.visit_id == visit.visit_id);
  CHECK(back.age == visit.age);
  CHECK(back.sex == visit.sex);
  CHECK(back.gold_label == visit.gold_label);
  CHECK(back.structural_volumes == visit.structural_volumes);
  CHECK(back.biomarkers == visit.biomarkers);
  CHECK(back.cognitive_scores == visit.cognitive_scores);
  CHECK(back.demographics == visit.demographics);
  CHECK(back.history == visit.history);
  CHECK(back.genetics == visit.genetics);
  REQUIRE(back.lab_values.count("glucose") == 1);
  CHECK(back.lab_values.at("glucose").value == 105.25);
  CHECK(back.lab_values.at("glucose").unit == "mg/dL");
}

TEST_CASE("cohort JSONL round-trip and rejection of malformed lines") {
  auto cohort = generate_synthetic_cohort(5, 6);
  std::string text = cohort_to_jsonl(cohort);
  auto back = cohort_from_jsonl(text);
  REQUIRE(back.size() == cohort.size());
  CHECK(cohort_to_jsonl(back) == text);

  CHECK_THROWS_AS(cohort_from_jsonl("{not json}\n"), ConfigError);
  CHECK_THROWS_AS(cohort_from_jsonl("{\"subject_id\": \"S1\"}\n"), ConfigError);
}

TEST_CASE("reference range validation and JSON round-trip") {
  ReferenceRange range{"Abeta", 800.0, 1700.0, "pg/mL"};
  CHECK_NOTHROW(range.validate());

  ReferenceRange inverted{"Abeta", 1700.0, 800.0, "pg/mL"};
  CHECK_THROWS_AS(inverted.validate(), ConfigError);
  ReferenceRange no_unit{"Abeta", 800.0, 1700.0, ""};
  CHECK_THROWS_AS(no_unit.validate(), ConfigError);

  ReferenceRanges ranges{{"Abeta", range}};
  ReferenceRanges back = ranges_from_json(ranges_to_json(ranges));
  REQUIRE(back.count("Abeta") == 1);
  CHECK(back.at("Abeta").lower == 800.0);
  CHECK(back.at("Abeta").upper == 1700.0);
  CHECK(back.at("Abeta").unit == "pg/mL");
}

TEST_CASE("norm table lookup respects age bands and sex") {
  std::vector<NormBand> bands;
  bands.push_back(NormBand{"hippocampus", Sex::M, 18, 59, NormEntry{7000.0, 350.0}});
  bands.push_back(NormBand{"hippocampus", Sex::M, 60, 110, NormEntry{6200.0, 350.0}});
  bands.push_back(NormBand{"hippocampus", Sex::F, 18, 59, NormEntry{6700.0, 330.0}});
  bands.push_back(NormBand{"hippocampus", Sex::F, 60, 110, NormEntry{5900.0, 330.0}});
  NormTable table(bands);

  auto young = table.lookup("hippocampus", 40.0, Sex::M);
  REQUIRE(young.has_value());
  CHECK(young->mean == 7000.0);

  // Band edge: 59.x still belongs to the lower band, 60.0 to the upper.
  CHECK(table.lookup("hippocampus", 59.9, Sex::M)->mean == 7000.0);
  CHECK(table.lookup("hippocampus", 60.0, Sex::M)->mean == 6200.0);
  // The final band admits its upper edge.
  CHECK(table.lookup("hippocampus", 110.0, Sex::M)->mean == 6200.0);

  CHECK(table.lookup("hippocampus", 40.0, Sex::F)->mean == 6700.0);
  CHECK_FALSE(table.lookup("ventricles", 40.0, Sex::M).has_value());
}

TEST_CASE("norm table rejects overlap, gaps, and bad entries") {
  NormEntry entry{100.0, 10.0};
  SUBCASE("overlapping bands") {
    std::vector<NormBand> bands{NormBand{"x", Sex::M, 18, 70, entry},
                                NormBand{"x", Sex::M, 65, 110, entry}};
    CHECK_THROWS_AS(NormTable{bands}, ConfigError);
  }
  SUBCASE("coverage gap") {
    std::vector<NormBand> bands{NormBand{"x", Sex::M, 18, 50, entry},
                                NormBand{"x", Sex::M, 60, 110, entry}};
    CHECK_THROWS_AS(NormTable{bands}, ConfigError);
  }
  SUBCASE("non-positive stddev") {
    std::vector<NormBand> bands{NormBand{"x", Sex::M, 18, 110, NormEntry{100.0, 0.0}}};
    CHECK_THROWS_AS(NormTable{bands}, ConfigError);
  }
}

TEST_CASE("norm table JSON round-trip") {
  std::vector<NormBand> bands{NormBand{"x", Sex::M, 18, 110, NormEntry{100.0, 10.0}},
                              NormBand{"x", Sex::F, 18, 110, NormEntry{90.0, 9.0}}};
  NormTable table(bands);
  NormTable back = NormTable::from_json(table.to_json());
  REQUIRE(back.bands().size() == 2);
  CHECK(back.lookup("x", 30.0, Sex::F)->mean == 90.0);
}

TEST_CASE("synthetic cohort is deterministic in the seed") {
  auto a = generate_synthetic_cohort(42, 20);
  auto b = generate_synthetic_cohort(42, 20);
  auto c = generate_synthetic_cohort(43, 20);
  CHECK(cohort_to_jsonl(a) == cohort_to_jsonl(b));
  CHECK(cohort_to_jsonl(a) != cohort_to_jsonl(c));
}

TEST_CASE("synthetic cohort covers all labels and validates") {
  auto cohort = generate_synthetic_cohort(7, 3);
  std::set<DiagnosisLabel> seen;
  for (const auto& visit : cohort) {
    CHECK_NOTHROW(visit.validate());
    seen.insert(visit.gold_label);
  }
  CHECK(seen.size() == 3);
}

TEST_CASE("synthetic cohort label mix follows the stated weights") {
  auto cohort = generate_synthetic_cohort(1, 200, 1, 1);
  REQUIRE(cohort.size() == 200);
  std::map<DiagnosisLabel, int> counts;
  for (const auto& visit : cohort) counts[visit.gold_label]++;
  // 0.40 / 0.35 / 0.25 by largest remainder: exact at n=200.
  CHECK(counts[DiagnosisLabel::CN] == 80);
  CHECK(counts[DiagnosisLabel::MCI] == 70);
  CHECK(counts[DiagnosisLabel::Dementia] == 50);
}

TEST_CASE("synthetic ids and visit counts honor the requested shape") {
  auto cohort = generate_synthetic_cohort(9, 4, 2, 3);
  std::map<std::string, int> visits_per_subject;
  for (const auto& visit : cohort) visits_per_subject[visit.subject_id]++;
  REQUIRE(visits_per_subject.size() == 4);
  CHECK(visits_per_subject.count("S0001") == 1);
  CHECK(visits_per_subject.count("S0004") == 1);
  for (const auto& [subject, count] : visits_per_subject) {
    CHECK(count >= 2);
    CHECK(count <= 3);
  }
  // All visits of one subject share the gold label and ids are v01, v02, ...
  std::map<std::string, DiagnosisLabel> label_of;
  for (const auto& visit : cohort) {
    auto [it, inserted] = label_of.emplace(visit.subject_id, visit.gold_label);
    if (!inserted) CHECK(it->second == visit.gold_label);
  }
  bool saw_v01 = false;
  for (const auto& visit : cohort) saw_v01 = saw_v01 || visit.visit_id == "v01";
  CHECK(saw_v01);
}

TEST_CASE("synthetic measurements separate the classes on average") {
  auto cohort = generate_synthetic_cohort(3, 150);
  double cn_sum = 0.0, dem_sum = 0.0;
  int cn_n = 0, dem_n = 0;
  double cn_abeta = 0.0, dem_abeta = 0.0;
  for (const auto& visit : cohort) {
    auto it = visit.structural_volumes.find("hippocampus");
    if (it == visit.structural_volumes.end()) continue;
    if (visit.gold_label == DiagnosisLabel::CN) {
      cn_sum += it->second;
      cn_abeta += visit.biomarkers.at("Abeta");
      ++cn_n;
    } else if (visit.gold_label == DiagnosisLabel::Dementia) {
      dem_sum += it->second;
      dem_abeta += visit.biomarkers.at("Abeta");
      ++dem_n;
    }
  }
  REQUIRE(cn_n > 10);
  REQUIRE(dem_n > 10);
  CHECK(cn_sum / cn_n > dem_sum / dem_n);    // atrophy pattern
  CHECK(cn_abeta / cn_n > dem_abeta / dem_n);  // amyloid drop pattern
}

TEST_CASE("subject-wise split keeps subjects whole and is deterministic") {
  auto cohort = generate_synthetic_cohort(11, 40, 1, 3);
  CohortSplit split = split_subject_wise(cohort, 0.6, 0.2, 0.2, 5);
  CohortSplit again = split_subject_wise(cohort, 0.6, 0.2, 0.2, 5);
  CHECK(cohort_to_jsonl(split.train) == cohort_to_jsonl(again.train));
  CHECK(split.train.size() + split.val.size() + split.test.size() == cohort.size());

  auto subjects_of = [](const std::vector<SubjectVisit>& part) {
    std::set<std::string> out;
    for (const auto& visit : part) out.insert(visit.subject_id);
    return out;
  };
  auto train_ids = subjects_of(split.train);
  auto val_ids = subjects_of(split.val);
  auto test_ids = subjects_of(split.test);
  for (const auto& id : train_ids) {
    CHECK(val_ids.count(id) == 0);
    CHECK(test_ids.count(id) == 0);
  }
  for (const auto& id : val_ids) CHECK(test_ids.count(id) == 0);

  CHECK_THROWS_AS(split_subject_wise(cohort, 0.5, 0.2, 0.2, 5), std::invalid_argument);
}
