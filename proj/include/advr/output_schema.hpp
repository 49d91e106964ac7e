#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "advr/domain.hpp"

namespace advr {

enum class Confidence { High, Medium, Low };
std::string to_string(Confidence confidence);
std::optional<Confidence> parse_confidence(std::string_view token);

struct DiagnosticOutput {
  std::string reasoning;  // >= 1 non-whitespace character
  DiagnosisLabel diagnosis = DiagnosisLabel::CN;
  Confidence confidence = Confidence::Low;
};

enum class Violation {
  MissingReasoningTag,
  MissingDiagnosisTag,
  MissingConfidenceTag,
  InvalidDiagnosisValue,
  InvalidConfidenceValue,
  TagsOutOfOrder,
  DuplicateTag,
};
std::string to_string(Violation violation);

// Success and violations are mutually exclusive; on failure the violation
// list is non-empty.
struct ParseOutcome {
  std::optional<DiagnosticOutput> output;
  std::vector<Violation> violations;

  bool ok() const { return output.has_value(); }
};

// Accepts text containing, in order, lines beginning "Reasoning:",
// "Diagnosis:", "Confidence:" exactly once each. The tag word is
// case-insensitive and may be indented; each body extends to the next tag
// line, so reasoning may span lines. The Diagnosis body must contain exactly
// one CN/MCI/Dementia token (case-sensitive, whole word); the Confidence
// body, trimmed, must be exactly High, Medium, or Low. Text before the
// Reasoning tag is tolerated. A present Reasoning tag with an
// all-whitespace body reports MissingReasoningTag: the tag carries no
// content. Never throws; violations are ordered missing tags first
// (R, D, C), then duplicates, then ordering, then value errors.
ParseOutcome parse_output(std::string_view text);

// 1.0 iff parse_output succeeds, else 0.0. No partial credit.
double format_reward(std::string_view text);

// Canonical three-line form. parse_output(render_output(x)) == x whenever
// x.reasoning is trimmed, non-empty, and contains no tag-initial lines.
std::string render_output(const DiagnosticOutput& output);

}  // namespace advr
