#include "advr/refine.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "advr/errors.hpp"
#include "advr/rng.hpp"
#include "advr/text_match.hpp"

namespace advr {

using nlohmann::json;

ScriptedThinker::ScriptedThinker(std::vector<std::string> responses)
    : responses_(std::move(responses)) {}

std::string ScriptedThinker::complete(const std::string&, int) {
  if (next_ >= responses_.size()) {
    throw std::logic_error("scripted thinker exhausted after " + std::to_string(next_) +
                           " responses");
  }
  return responses_[next_++];
}

RemoteThinker::RemoteThinker(const std::string& url, int timeout_ms, int max_in_flight)
    : url_(parse_url(url)), timeout_ms_(timeout_ms), slots_(max_in_flight) {
  if (timeout_ms <= 0) throw ConfigError("timeout", "must be positive");
  if (max_in_flight <= 0) throw ConfigError("concurrency_bound", "must be positive");
}

std::string RemoteThinker::complete(const std::string& prompt, int max_tokens) {
  SlotGuard slot(slots_);
  httplib::Client client(url_.base);
  client.set_connection_timeout(timeout_ms_ / 1000, (timeout_ms_ % 1000) * 1000);
  client.set_read_timeout(timeout_ms_ / 1000, (timeout_ms_ % 1000) * 1000);
  client.set_write_timeout(timeout_ms_ / 1000, (timeout_ms_ % 1000) * 1000);
  json body{{"prompt", prompt}, {"max_tokens", max_tokens}};
  auto res = client.Post(url_.path, body.dump(), "application/json");
  if (!res) throw BackendError("thinker request failed", httplib::to_string(res.error()));
  if (res->status < 200 || res->status >= 300) {
    throw BackendError("thinker request failed", "http status " + std::to_string(res->status));
  }
  json reply;
  try {
    reply = json::parse(res->body);
  } catch (const json::exception& e) {
    throw BackendError("thinker reply unparsable", e.what());
  }
  if (!reply.contains("text") || !reply.at("text").is_string()) {
    throw BackendError("thinker reply malformed", "missing field text");
  }
  return reply.at("text").get<std::string>();
}

namespace {

constexpr const char* kReportOpen = "=== Clinical Report ===";
constexpr const char* kReportClose = "=== End Report ===";
constexpr const char* kSchemaBlock =
    "Respond exactly in this format:\n"
    "Reasoning: [analysis]\n"
    "Diagnosis: [CN/MCI/Dementia]\n"
    "Confidence: [High/Medium/Low]";

std::string report_block(const ClinicalReport& report) {
  return std::string(kReportOpen) + "\n" + report.render() + kReportClose;
}

}  // namespace

std::string build_diagnosis_prompt(const ClinicalReport& report) {
  return "You are a clinical diagnostician. Review the following clinical report.\n\n" +
         report_block(report) +
         "\n\nBased on the findings above, what is the most probable diagnosis?\n" + kSchemaBlock;
}

std::vector<std::string> build_feedback_lines(std::string_view reasoning, DiagnosisLabel gold,
                                              const SubjectVisit* visit,
                                              const ReferenceRanges& ranges,
                                              const GuidelineDictionary& dict) {
  std::vector<std::string> lines;

  EvidenceMap feat_evidence;
  feature_reward(reasoning, dict, &feat_evidence);
  for (const char* domain : kCognitiveDomains) {
    bool has_domain = feat_evidence.count("feat:" + std::string(domain) + ":domain") > 0;
    bool has_sub = feat_evidence.count("feat:" + std::string(domain) + ":subdomain") > 0;
    if (has_domain && has_sub) continue;
    // Up to two example terms drawn from the subdomain lists, in lexicon
    // order, so the hint stays short and deterministic.
    std::vector<std::string> examples;
    for (const auto& [sub, terms] : dict.domain_lexicon.at(domain).subdomains) {
      for (const auto& term : terms) {
        if (examples.size() < 2) examples.push_back(term);
      }
      if (examples.size() >= 2) break;
    }
    std::string hint = examples.empty()
                           ? ""
                           : " (for example: " + examples[0] +
                                 (examples.size() > 1 ? ", " + examples[1] : "") + ")";
    if (!has_domain) {
      lines.push_back("Address the " + std::string(domain) + " domain explicitly" + hint + ".");
    } else {
      lines.push_back("Add specific " + std::string(domain) + " findings" + hint + ".");
    }
  }

  EvidenceMap bio_evidence;
  biomarker_reward(reasoning, visit, ranges, dict, &bio_evidence);
  for (const char* name : kBiomarkerNames) {
    bool mentioned = bio_evidence.count("bio:" + std::string(name) + ":mention") > 0;
    bool status_ok = bio_evidence.count("bio:" + std::string(name) + ":status") > 0;
    if (!mentioned) {
      lines.push_back("Discuss the CSF biomarker " + biomarker_display_name(name) + ".");
    } else if (!status_ok && visit != nullptr) {
      lines.push_back("State whether " + biomarker_display_name(name) +
                      " is normal or abnormal per its reference range.");
    }
  }

  if (auto it = dict.exclusion_terms.find(gold); it != dict.exclusion_terms.end()) {
    std::vector<text::Phrase> phrases;
    for (const auto& term : it->second) phrases.push_back(text::Phrase{term, 0});
    for (const auto& span : text::find_matches(reasoning, phrases)) {
      lines.push_back("Reconsider the assertion '" + span.term +
                      "': it conflicts with the diagnostic category supported by the findings.");
    }
  }

  lines.push_back(
      "Re-evaluate the most probable diagnosis against the criteria addressed above.");

  // Defensive guarantee: targeted feedback must never reveal the gold label.
  std::string gold_token = to_string(gold);
  std::erase_if(lines, [&](const std::string& line) {
    return text::contains_term(line, gold_token);
  });
  return lines;
}

std::string build_refinement_prompt(const ClinicalReport& report, const std::string& last_response,
                                    const std::optional<DiagnosticOutput>& parsed,
                                    DiagnosisLabel gold, const SubjectVisit* visit,
                                    const ReferenceRanges& ranges,
                                    const GuidelineDictionary& dict) {
  std::string prompt =
      "Your previous answer was not accepted by the validator. Review the report and the "
      "feedback, then answer again.\n\n" +
      report_block(report) + "\n\n=== Previous Response ===\n" + last_response +
      "\n=== End Previous Response ===\n\nFeedback:\n";
  if (!parsed) {
    prompt +=
        "- The previous response did not follow the required output format; use the exact "
        "three-line template.\n";
  }
  std::string_view reasoning = parsed ? std::string_view(parsed->reasoning)
                                      : std::string_view(last_response);
  for (const auto& line : build_feedback_lines(reasoning, gold, visit, ranges, dict)) {
    prompt += "- " + line + "\n";
  }
  prompt += "\n";
  prompt += kSchemaBlock;
  return prompt;
}

std::string build_correction_prompt(const ClinicalReport& report, DiagnosisLabel gold) {
  return "The correct diagnosis for this case is " + to_string(gold) +
         ".\n\nRewrite your reasoning so it supports this diagnosis, citing findings from the "
         "report below.\n\n" +
         report_block(report) + "\n\n" + kSchemaBlock;
}

std::string to_string(RefinePhase phase) {
  switch (phase) {
    case RefinePhase::Init: return "Init";
    case RefinePhase::Queried: return "Queried";
    case RefinePhase::Validated: return "Validated";
    case RefinePhase::ForcedCorrection: return "ForcedCorrection";
    case RefinePhase::Emitted: return "Emitted";
    case RefinePhase::Failed: return "Failed";
  }
  throw std::logic_error("unhandled RefinePhase");
}

namespace {

struct Attempt {
  std::optional<DiagnosticOutput> output;
  bool accepted = false;
};

// One query/validate cycle; records the transcript entry.
Attempt attempt(ThinkerBackend& thinker, const std::string& prompt, int max_tokens,
                DiagnosisLabel gold, RefinementState& state) {
  state.phase = RefinePhase::Queried;
  std::string response = thinker.complete(prompt, max_tokens);
  ParseOutcome outcome = parse_output(response);
  Attempt result;
  bool label_match = outcome.ok() && outcome.output->diagnosis == gold;
  state.transcript.push_back(TranscriptEntry{prompt, response, outcome.ok(), label_match});
  state.phase = RefinePhase::Validated;
  if (outcome.ok()) result.output = std::move(outcome.output);
  result.accepted = label_match;
  return result;
}

SampleResult emit(RefinementState state, const std::string& input,
                  const DiagnosticOutput& output, DiagnosisLabel gold, const std::string& path) {
  state.phase = RefinePhase::Emitted;
  state.path = path;
  SampleResult result;
  result.pair = TrainingPair{input, render_output(output), gold, false};
  result.state = std::move(state);
  return result;
}

SampleResult fail(RefinementState state, const std::string& reason) {
  state.phase = RefinePhase::Failed;
  state.path = "failed";
  state.failure_reason = reason;
  return SampleResult{std::nullopt, std::move(state)};
}

}  // namespace

SampleResult run_sample(const SubjectVisit& visit, const NormTable& norms,
                        const ReferenceRanges& ranges, const GuidelineDictionary& dict,
                        ThinkerBackend& thinker, int max_rethinks, int max_tokens) {
  if (max_rethinks < 0) throw std::invalid_argument("max_rethinks must be >= 0");
  if (max_tokens < 1) throw std::invalid_argument("max_tokens must be positive");
  ClinicalReport report = synthesize_visit_report(visit, norms, ranges);
  std::string input = build_diagnosis_prompt(report);
  DiagnosisLabel gold = visit.gold_label;
  RefinementState state;

  try {
    Attempt last = attempt(thinker, input, max_tokens, gold, state);
    if (last.accepted) return emit(std::move(state), input, *last.output, gold, "first-try");

    for (int k = 1; k <= max_rethinks; ++k) {
      const TranscriptEntry& prev = state.transcript.back();
      std::string prompt = build_refinement_prompt(report, prev.response, last.output, gold,
                                                   &visit, ranges, dict);
      last = attempt(thinker, prompt, max_tokens, gold, state);
      state.rethinks = k;
      if (last.accepted) {
        return emit(std::move(state), input, *last.output, gold, "rethink-" + std::to_string(k));
      }
    }

    state.phase = RefinePhase::ForcedCorrection;
    std::string correction = build_correction_prompt(report, gold);
    for (int attempt_no = 0; attempt_no < 2; ++attempt_no) {
      Attempt forced = attempt(thinker, correction, max_tokens, gold, state);
      if (forced.accepted) return emit(std::move(state), input, *forced.output, gold, "forced");
      state.phase = RefinePhase::ForcedCorrection;
    }
    return fail(std::move(state), "forced correction rejected twice");
  } catch (const BackendError& e) {
    return fail(std::move(state), e.what());
  }
}

std::string fnv1a_hex(std::string_view data) {
  std::uint64_t hash = 14695981039346656037ULL;
  for (unsigned char c : data) {
    hash ^= c;
    hash *= 1099511628211ULL;
  }
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[hash & 0xF];
    hash >>= 4;
  }
  return out;
}

namespace {

std::string transcript_digest(const RefinementState& state) {
  std::string blob;
  for (const auto& entry : state.transcript) {
    blob += entry.prompt;
    blob += '\x1e';
    blob += entry.response;
    blob += entry.parse_ok ? '\x01' : '\x00';
    blob += entry.label_match ? '\x01' : '\x00';
    blob += '\x1f';
  }
  return fnv1a_hex(blob);
}

}  // namespace

DatasetSummary build_dataset(const std::vector<SubjectVisit>& cohort, const NormTable& norms,
                             const ReferenceRanges& ranges, const GuidelineDictionary& dict,
                             ThinkerBackend& thinker, const DatasetConfig& config,
                             const std::string& out_path) {
  if (cohort.empty()) throw std::invalid_argument("cohort must be non-empty");
  if (config.review_fraction < 0.0 || config.review_fraction > 1.0) {
    throw std::invalid_argument("review_fraction must be in [0,1]");
  }
  std::vector<const SubjectVisit*> ordered;
  ordered.reserve(cohort.size());
  for (const auto& visit : cohort) ordered.push_back(&visit);
  std::sort(ordered.begin(), ordered.end(), [](const SubjectVisit* a, const SubjectVisit* b) {
    return std::tie(a->subject_id, a->visit_id) < std::tie(b->subject_id, b->visit_id);
  });

  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw ConfigError(out_path, "cannot open for writing");

  DatasetSummary summary;
  Rng review_rng(config.seed);
  for (const SubjectVisit* visit : ordered) {
    SampleResult result =
        run_sample(*visit, norms, ranges, dict, thinker, config.max_rethinks, config.max_tokens);
    const std::string& path = result.state.path;
    if (!result.pair) {
      ++summary.failed;
      continue;
    }
    if (path == "first-try") {
      ++summary.first_try;
    } else if (path == "rethink-1") {
      ++summary.rethink_1;
    } else if (path == "rethink-2") {
      ++summary.rethink_2;
    } else if (path == "forced") {
      ++summary.forced;
    } else {
      ++summary.rethink_more;
    }
    // Flags are drawn per emitted pair in emission order, so a fixed seed
    // reproduces the same review set.
    bool review = review_rng.bernoulli(config.review_fraction);
    if (review) ++summary.review_flagged;
    json record{{"input", result.pair->input},
                {"target", result.pair->target},
                {"gold", to_string(result.pair->gold)},
                {"path", path},
                {"review_flag", review},
                {"transcript_digest", transcript_digest(result.state)}};
    out << record.dump() << '\n';
  }
  if (!out) throw ConfigError(out_path, "write failed");
  return summary;
}

}  // namespace advr
