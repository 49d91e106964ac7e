#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <doctest.h>
#include <nlohmann/json.hpp>

#include "advr/builtin_data.hpp"
#include "advr/errors.hpp"
#include "advr/refine.hpp"
#include "advr/text_match.hpp"

using namespace advr;
using nlohmann::json;

namespace {

SubjectVisit make_visit(DiagnosisLabel gold, const std::string& subject = "S0500",
                        const std::string& visit_id = "v01") {
  SubjectVisit v;
  v.subject_id = subject;
  v.visit_id = visit_id;
  v.age = 74.0;
  v.sex = Sex::F;
  v.structural_volumes["hippocampus"] = 6000.0;
  v.biomarkers["Abeta"] = 650.0;
  v.biomarkers["tTau"] = 420.0;
  v.biomarkers["pTau"] = 41.0;
  v.cognitive_scores["MMSE"] = 26.0;
  v.gold_label = gold;
  v.validate();
  return v;
}

std::string response_for(const std::string& label) {
  return "Reasoning: The profile was reviewed against the available findings.\nDiagnosis: " +
         label + "\nConfidence: High";
}

// Covers every domain with a subdomain term and asserts each biomarker with
// its correct status for make_visit's values under the builtin ranges.
const char* kThoroughReasoning =
    "Amyloid beta is reduced, total tau is elevated, and phosphorylated tau is elevated. "
    "Memory decline with rapid forgetting; executive deficits with impaired judgment; "
    "visuospatial decline with getting lost; language decline with word-finding difficulty.";

std::string temp_path(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

std::vector<json> read_jsonl(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::vector<json> records;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) records.push_back(json::parse(line));
  }
  return records;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_CASE("transcript digest has fixed known values") {
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
  CHECK(fnv1a_hex("foobar") == "85944171f73967e8");
  CHECK(fnv1a_hex("foobar").size() == 16);
}

TEST_CASE("scripted completions replay in order and refuse overreads") {
  ScriptedThinker thinker({"one", "two"});
  CHECK(thinker.calls() == 0);
  CHECK(thinker.complete("p", 10) == "one");
  CHECK(thinker.complete("p", 10) == "two");
  CHECK(thinker.calls() == 2);
  CHECK_THROWS_AS(thinker.complete("p", 10), std::logic_error);
}

TEST_CASE("diagnosis prompt embeds the rendered report and the answer template") {
  auto visit = make_visit(DiagnosisLabel::MCI);
  auto report = synthesize_visit_report(visit, builtin_norm_table(), builtin_reference_ranges());
  std::string prompt = build_diagnosis_prompt(report);
  CHECK(prompt.find("=== Clinical Report ===") != std::string::npos);
  CHECK(prompt.find("=== End Report ===") != std::string::npos);
  CHECK(prompt.find(report.render()) != std::string::npos);
  CHECK(prompt.find("Reasoning: [analysis]") != std::string::npos);
  CHECK(prompt.find("Diagnosis: [CN/MCI/Dementia]") != std::string::npos);
  CHECK(prompt.find("Confidence: [High/Medium/Low]") != std::string::npos);
}

TEST_CASE("feedback targets exactly the unmet rubric items") {
  auto dict = resolve_guideline("niaaa");
  auto ranges = builtin_reference_ranges();
  auto visit = make_visit(DiagnosisLabel::MCI);

  SUBCASE("empty reasoning asks for every domain and biomarker") {
    auto lines = build_feedback_lines("", DiagnosisLabel::MCI, &visit, ranges, dict);
    int domain_lines = 0, biomarker_lines = 0;
    for (const auto& line : lines) {
      if (line.rfind("Address the", 0) == 0) ++domain_lines;
      if (line.rfind("Discuss the CSF biomarker", 0) == 0) ++biomarker_lines;
    }
    CHECK(domain_lines == 4);
    CHECK(biomarker_lines == 3);
    CHECK(lines.back() ==
          "Re-evaluate the most probable diagnosis against the criteria addressed above.");
  }

  SUBCASE("thorough reasoning leaves only the closing instruction") {
    auto lines =
        build_feedback_lines(kThoroughReasoning, DiagnosisLabel::MCI, &visit, ranges, dict);
    REQUIRE(lines.size() == 1);
    CHECK(lines[0].rfind("Re-evaluate", 0) == 0);
  }

  SUBCASE("mention without status asks for the characterization") {
    std::string reasoning = "Amyloid beta, total tau, and phosphorylated tau were measured.";
    auto lines = build_feedback_lines(reasoning, DiagnosisLabel::MCI, &visit, ranges, dict);
    int status_lines = 0;
    for (const auto& line : lines) {
      if (line.rfind("State whether", 0) == 0) ++status_lines;
    }
    CHECK(status_lines == 3);

    // Without a visit there is no true status to check against.
    auto no_visit = build_feedback_lines(reasoning, DiagnosisLabel::MCI, nullptr, ranges, dict);
    for (const auto& line : no_visit) CHECK(line.rfind("State whether", 0) != 0);
  }

  SUBCASE("asserted exclusion terms are challenged") {
    std::string reasoning = "There is loss of independence in daily tasks.";
    auto lines = build_feedback_lines(reasoning, DiagnosisLabel::MCI, &visit, ranges, dict);
    bool found = false;
    for (const auto& line : lines) {
      if (line.find("Reconsider the assertion 'loss of independence'") != std::string::npos) {
        found = true;
      }
    }
    CHECK(found);
  }

  SUBCASE("no feedback line leaks the gold label") {
    for (auto gold : {DiagnosisLabel::CN, DiagnosisLabel::MCI, DiagnosisLabel::Dementia}) {
      auto lines = build_feedback_lines("The scan was reviewed.", gold, &visit, ranges, dict);
      CHECK(!lines.empty());
      for (const auto& line : lines) {
        CHECK_FALSE(text::contains_term(line, to_string(gold)));
      }
    }
  }
}

TEST_CASE("rethink prompt carries the previous response and withholds the answer") {
  auto dict = resolve_guideline("niaaa");
  auto ranges = builtin_reference_ranges();
  auto visit = make_visit(DiagnosisLabel::Dementia);
  auto report = synthesize_visit_report(visit, builtin_norm_table(), ranges);

  std::string previous = response_for("CN");
  ParseOutcome outcome = parse_output(previous);
  REQUIRE(outcome.ok());
  std::string prompt = build_refinement_prompt(report, previous, outcome.output,
                                               DiagnosisLabel::Dementia, &visit, ranges, dict);
  CHECK(prompt.find("=== Previous Response ===") != std::string::npos);
  CHECK(prompt.find(previous) != std::string::npos);
  CHECK(prompt.find("Feedback:") != std::string::npos);
  CHECK(prompt.find("Reasoning: [analysis]") != std::string::npos);
  // Everything before the fixed answer template must withhold the gold label;
  // the template itself enumerates all three labels by design.
  std::string body = prompt.substr(0, prompt.rfind("Respond exactly in this format:"));
  CHECK_FALSE(text::contains_term(body, "Dementia"));
  CHECK(prompt.find("did not follow the required output format") == std::string::npos);

  // A response that failed to parse gets the format reminder first.
  std::string garbled = "I believe the answer is clear.";
  std::string format_prompt = build_refinement_prompt(report, garbled, std::nullopt,
                                                      DiagnosisLabel::Dementia, &visit, ranges,
                                                      dict);
  CHECK(format_prompt.find("did not follow the required output format") != std::string::npos);
}

TEST_CASE("correction prompt states the expected diagnosis") {
  auto visit = make_visit(DiagnosisLabel::Dementia);
  auto report = synthesize_visit_report(visit, builtin_norm_table(), builtin_reference_ranges());
  std::string prompt = build_correction_prompt(report, DiagnosisLabel::Dementia);
  CHECK(prompt.find("The correct diagnosis for this case is Dementia.") == 0);
  CHECK(prompt.find(report.render()) != std::string::npos);
}

TEST_CASE("refinement loop escalates through rethinks to forced correction") {
  auto norms = builtin_norm_table();
  auto ranges = builtin_reference_ranges();
  auto dict = resolve_guideline("niaaa");
  auto visit = make_visit(DiagnosisLabel::MCI);
  const std::string right = response_for("MCI");
  const std::string wrong = response_for("CN");

  SUBCASE("accepted immediately") {
    ScriptedThinker thinker({right});
    auto result = run_sample(visit, norms, ranges, dict, thinker);
    CHECK(thinker.calls() == 1);
    CHECK(result.state.phase == RefinePhase::Emitted);
    CHECK(result.state.path == "first-try");
    CHECK(result.state.rethinks == 0);
    REQUIRE(result.pair.has_value());
    CHECK(result.pair->gold == DiagnosisLabel::MCI);
    CHECK(result.pair->input == build_diagnosis_prompt(
                                    synthesize_visit_report(visit, norms, ranges)));
    auto target = parse_output(result.pair->target);
    REQUIRE(target.ok());
    CHECK(target.output->diagnosis == DiagnosisLabel::MCI);
  }

  SUBCASE("one rethink") {
    ScriptedThinker thinker({wrong, right});
    auto result = run_sample(visit, norms, ranges, dict, thinker);
    CHECK(thinker.calls() == 2);
    CHECK(result.state.path == "rethink-1");
    CHECK(result.state.rethinks == 1);
    CHECK(result.state.transcript.size() == 2);
    CHECK_FALSE(result.state.transcript[0].label_match);
    CHECK(result.state.transcript[0].parse_ok);
    CHECK(result.state.transcript[1].label_match);
  }

  SUBCASE("two rethinks") {
    ScriptedThinker thinker({wrong, wrong, right});
    auto result = run_sample(visit, norms, ranges, dict, thinker);
    CHECK(thinker.calls() == 3);
    CHECK(result.state.path == "rethink-2");
    CHECK(result.state.rethinks == 2);
  }

  SUBCASE("exhausted rethinks escalate to a stated correction") {
    ScriptedThinker thinker({wrong, wrong, wrong, right});
    auto result = run_sample(visit, norms, ranges, dict, thinker);
    CHECK(thinker.calls() == 4);
    CHECK(result.state.path == "forced");
    CHECK(result.state.phase == RefinePhase::Emitted);
    REQUIRE(result.pair.has_value());
    // The forced prompt is the only one allowed to name the gold label.
    CHECK(result.state.transcript[3].prompt.find("The correct diagnosis for this case is MCI.") ==
          0);
    CHECK(result.state.transcript[1].prompt.find("correct diagnosis") == std::string::npos);
  }

  SUBCASE("forced correction retries once") {
    ScriptedThinker thinker({wrong, wrong, wrong, wrong, right});
    auto result = run_sample(visit, norms, ranges, dict, thinker);
    CHECK(thinker.calls() == 5);
    CHECK(result.state.path == "forced");
    REQUIRE(result.pair.has_value());
  }

  SUBCASE("five rejections fail the sample") {
    ScriptedThinker thinker({wrong, wrong, wrong, wrong, wrong});
    auto result = run_sample(visit, norms, ranges, dict, thinker);
    CHECK(thinker.calls() == 5);
    CHECK(result.state.phase == RefinePhase::Failed);
    CHECK(result.state.path == "failed");
    CHECK(result.state.failure_reason == "forced correction rejected twice");
    CHECK_FALSE(result.pair.has_value());
  }

  SUBCASE("an unparsable but gold-mentioning response is still rejected") {
    ScriptedThinker thinker({"The diagnosis is MCI, certainly.", right});
    auto result = run_sample(visit, norms, ranges, dict, thinker);
    CHECK(result.state.path == "rethink-1");
    CHECK_FALSE(result.state.transcript[0].parse_ok);
    CHECK(result.state.transcript[1].prompt.find("did not follow the required output format") !=
          std::string::npos);
  }

  SUBCASE("zero rethinks jump straight to the correction") {
    ScriptedThinker thinker({wrong, right});
    auto result = run_sample(visit, norms, ranges, dict, thinker, 0);
    CHECK(thinker.calls() == 2);
    CHECK(result.state.path == "forced");
  }

  SUBCASE("invalid knobs throw") {
    ScriptedThinker thinker({right});
    CHECK_THROWS_AS(run_sample(visit, norms, ranges, dict, thinker, -1),
                    std::invalid_argument);
    CHECK_THROWS_AS(run_sample(visit, norms, ranges, dict, thinker, 2, 0),
                    std::invalid_argument);
  }
}

namespace {

class FailingThinker : public ThinkerBackend {
 public:
  explicit FailingThinker(int fail_after, std::string ok_response)
      : fail_after_(fail_after), ok_(std::move(ok_response)) {}
  std::string complete(const std::string&, int) override {
    if (calls_++ >= fail_after_) throw BackendError("thinker request failed", "socket closed");
    return ok_;
  }

 private:
  int fail_after_;
  int calls_ = 0;
  std::string ok_;
};

}  // namespace

TEST_CASE("transport failures mark the sample failed instead of propagating") {
  auto norms = builtin_norm_table();
  auto ranges = builtin_reference_ranges();
  auto dict = resolve_guideline("niaaa");
  auto visit = make_visit(DiagnosisLabel::MCI);

  FailingThinker immediate(0, "");
  auto result = run_sample(visit, norms, ranges, dict, immediate);
  CHECK(result.state.phase == RefinePhase::Failed);
  CHECK_FALSE(result.pair.has_value());
  CHECK(result.state.failure_reason.find("thinker request failed") != std::string::npos);

  FailingThinker mid_loop(2, response_for("CN"));
  result = run_sample(visit, norms, ranges, dict, mid_loop);
  CHECK(result.state.phase == RefinePhase::Failed);
  CHECK(result.state.transcript.size() == 2);  // entries only for completed calls
}

TEST_CASE("dataset construction orders visits, counts paths, and writes records") {
  auto norms = builtin_norm_table();
  auto ranges = builtin_reference_ranges();
  auto dict = resolve_guideline("niaaa");

  // Deliberately out of order; processing runs (S1,v01), (S1,v02), (S2,v01).
  std::vector<SubjectVisit> cohort;
  cohort.push_back(make_visit(DiagnosisLabel::Dementia, "S2", "v01"));
  cohort.push_back(make_visit(DiagnosisLabel::MCI, "S1", "v02"));
  cohort.push_back(make_visit(DiagnosisLabel::CN, "S1", "v01"));

  // S1v01 first try, S1v02 one rethink, S2v01 forced after three misses.
  std::vector<std::string> script = {
      response_for("CN"),
      response_for("CN"), response_for("MCI"),
      response_for("CN"), response_for("CN"), response_for("CN"), response_for("Dementia")};

  DatasetConfig config;
  config.seed = 11;
  std::string out = temp_path("advr_dataset_test.jsonl");

  SUBCASE("counts and record fields") {
    ScriptedThinker thinker(script);
    auto summary = build_dataset(cohort, norms, ranges, dict, thinker, config, out);
    CHECK(summary.first_try == 1);
    CHECK(summary.rethink_1 == 1);
    CHECK(summary.rethink_2 == 0);
    CHECK(summary.forced == 1);
    CHECK(summary.failed == 0);
    CHECK(summary.emitted() == 3);

    auto records = read_jsonl(out);
    REQUIRE(records.size() == 3);
    CHECK(records[0]["gold"] == "CN");
    CHECK(records[0]["path"] == "first-try");
    CHECK(records[1]["gold"] == "MCI");
    CHECK(records[1]["path"] == "rethink-1");
    CHECK(records[2]["gold"] == "Dementia");
    CHECK(records[2]["path"] == "forced");
    for (const auto& record : records) {
      CHECK(record.contains("input"));
      CHECK(record.contains("target"));
      CHECK(record.contains("review_flag"));
      std::string digest = record["transcript_digest"].get<std::string>();
      CHECK(digest.size() == 16);
      CHECK(digest.find_first_not_of("0123456789abcdef") == std::string::npos);
    }
  }

  SUBCASE("reruns with the same script and seed are byte-identical") {
    std::string out2 = temp_path("advr_dataset_test2.jsonl");
    ScriptedThinker first(script);
    ScriptedThinker second(script);
    build_dataset(cohort, norms, ranges, dict, first, config, out);
    build_dataset(cohort, norms, ranges, dict, second, config, out2);
    CHECK(read_file(out) == read_file(out2));
    std::filesystem::remove(out2);
  }

  SUBCASE("review fraction endpoints") {
    DatasetConfig all = config;
    all.review_fraction = 1.0;
    ScriptedThinker thinker(script);
    auto summary = build_dataset(cohort, norms, ranges, dict, thinker, all, out);
    CHECK(summary.review_flagged == 3);
    for (const auto& record : read_jsonl(out)) CHECK(record["review_flag"] == true);

    DatasetConfig none = config;
    none.review_fraction = 0.0;
    ScriptedThinker again(script);
    summary = build_dataset(cohort, norms, ranges, dict, again, none, out);
    CHECK(summary.review_flagged == 0);
  }

  SUBCASE("failures are counted but never written") {
    std::vector<std::string> all_wrong(5, response_for("CN"));
    std::vector<SubjectVisit> one{make_visit(DiagnosisLabel::MCI)};
    ScriptedThinker thinker(all_wrong);
    auto summary = build_dataset(one, norms, ranges, dict, thinker, config, out);
    CHECK(summary.failed == 1);
    CHECK(summary.emitted() == 0);
    CHECK(read_jsonl(out).empty());
  }

  SUBCASE("input validation") {
    ScriptedThinker thinker(script);
    CHECK_THROWS_AS(build_dataset({}, norms, ranges, dict, thinker, config, out),
                    std::invalid_argument);
    DatasetConfig bad = config;
    bad.review_fraction = 1.5;
    CHECK_THROWS_AS(build_dataset(cohort, norms, ranges, dict, thinker, bad, out),
                    std::invalid_argument);
  }

  std::filesystem::remove(out);
}
