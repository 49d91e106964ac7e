#pragma once

#include <cstdint>
#include <optional>
#include <semaphore>
#include <string>
#include <string_view>
#include <vector>

#include "advr/guideline.hpp"
#include "advr/net.hpp"
#include "advr/output_schema.hpp"
#include "advr/report.hpp"

namespace advr {

// Text-completion provider for the refinement loop. Implementations must be
// safe for concurrent calls.
class ThinkerBackend {
 public:
  virtual ~ThinkerBackend() = default;
  // Throws BackendError on transport failures.
  virtual std::string complete(const std::string& prompt, int max_tokens) = 0;
};

// Replays a fixed response list in order. Exhausting the script mid-sample is
// a test-harness bug and throws std::logic_error rather than failing softly.
class ScriptedThinker : public ThinkerBackend {
 public:
  explicit ScriptedThinker(std::vector<std::string> responses);
  std::string complete(const std::string& prompt, int max_tokens) override;
  std::size_t calls() const { return next_; }

 private:
  std::vector<std::string> responses_;
  std::size_t next_ = 0;
};

// HTTP client: POST {prompt, max_tokens}, reply {text}. Concurrent requests
// are bounded by max_in_flight.
class RemoteThinker : public ThinkerBackend {
 public:
  RemoteThinker(const std::string& url, int timeout_ms, int max_in_flight = 4);
  std::string complete(const std::string& prompt, int max_tokens) override;

 private:
  ParsedUrl url_;
  int timeout_ms_;
  std::counting_semaphore<> slots_;
};

// Deterministic diagnosis prompt: embeds the full rendered report and the
// required response schema verbatim.
std::string build_diagnosis_prompt(const ClinicalReport& report);

// Guideline-driven feedback for an unaccepted response: unaddressed
// cognitive domains (with example terms), undiscussed biomarkers, missing
// status characterizations, and asserted terms that conflict with the
// supported category. Lines never contain the gold label token; a null visit
// skips status feedback.
std::vector<std::string> build_feedback_lines(std::string_view reasoning, DiagnosisLabel gold,
                                              const SubjectVisit* visit,
                                              const ReferenceRanges& ranges,
                                              const GuidelineDictionary& dict);

// Rethink prompt: report, the previous response, and targeted feedback. The
// gold label is withheld; when the previous response failed to parse, the
// feedback opens with the format requirement instead of parsed-reasoning
// critique.
std::string build_refinement_prompt(const ClinicalReport& report, const std::string& last_response,
                                    const std::optional<DiagnosticOutput>& parsed,
                                    DiagnosisLabel gold, const SubjectVisit* visit,
                                    const ReferenceRanges& ranges,
                                    const GuidelineDictionary& dict);

// Forced-correction prompt: states the correct diagnosis and instructs a
// rewrite grounded in the report.
std::string build_correction_prompt(const ClinicalReport& report, DiagnosisLabel gold);

enum class RefinePhase { Init, Queried, Validated, ForcedCorrection, Emitted, Failed };
std::string to_string(RefinePhase phase);

struct TranscriptEntry {
  std::string prompt;
  std::string response;
  bool parse_ok = false;
  bool label_match = false;
};

struct RefinementState {
  RefinePhase phase = RefinePhase::Init;
  int rethinks = 0;  // completed rethink cycles, <= max_rethinks
  std::vector<TranscriptEntry> transcript;  // append-only, one entry per call
  std::string path;  // "first-try", "rethink-<k>", "forced", "failed"
  std::string failure_reason;
};

struct TrainingPair {
  std::string input;   // diagnosis prompt embedding the report
  std::string target;  // canonical rendered output; parses, diagnosis == gold
  DiagnosisLabel gold = DiagnosisLabel::CN;
  bool review_flag = false;
};

struct SampleResult {
  std::optional<TrainingPair> pair;  // absent iff state.phase == Failed
  RefinementState state;
};

// One pass of the self-refinement loop: query, validate the diagnosis
// against gold, rethink up to max_rethinks times, then force-correct with
// one retry. Backend errors mark the sample Failed instead of propagating.
SampleResult run_sample(const SubjectVisit& visit, const NormTable& norms,
                        const ReferenceRanges& ranges, const GuidelineDictionary& dict,
                        ThinkerBackend& thinker, int max_rethinks = 2, int max_tokens = 1024);

struct DatasetSummary {
  int first_try = 0;
  int rethink_1 = 0;
  int rethink_2 = 0;
  int rethink_more = 0;  // rethink cycles beyond 2 when configured higher
  int forced = 0;
  int failed = 0;
  int review_flagged = 0;

  int emitted() const { return first_try + rethink_1 + rethink_2 + rethink_more + forced; }
};

struct DatasetConfig {
  int max_rethinks = 2;
  int max_tokens = 1024;
  double review_fraction = 0.05;  // seeded pair sampling for expert review
  std::uint64_t seed = 0;
};

// Processes visits ordered by (subject_id, visit_id), writing one record per
// emitted pair as a JSON line with fields {input, target, gold, path,
// review_flag, transcript_digest}. Per-sample failures are counted, never
// fatal. Deterministic for a fixed scripted backend and config.
DatasetSummary build_dataset(const std::vector<SubjectVisit>& cohort, const NormTable& norms,
                             const ReferenceRanges& ranges, const GuidelineDictionary& dict,
                             ThinkerBackend& thinker, const DatasetConfig& config,
                             const std::string& out_path);

// FNV-1a 64-bit digest, hex-encoded; used to fingerprint transcripts.
std::string fnv1a_hex(std::string_view data);

}  // namespace advr
