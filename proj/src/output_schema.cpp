#include "advr/output_schema.hpp"

#include <cctype>
#include <stdexcept>

#include "advr/text_match.hpp"

namespace advr {

std::string to_string(Confidence confidence) {
  switch (confidence) {
    case Confidence::High: return "High";
    case Confidence::Medium: return "Medium";
    case Confidence::Low: return "Low";
  }
  throw std::logic_error("unhandled Confidence");
}

std::optional<Confidence> parse_confidence(std::string_view token) {
  if (token == "High") return Confidence::High;
  if (token == "Medium") return Confidence::Medium;
  if (token == "Low") return Confidence::Low;
  return std::nullopt;
}

std::string to_string(Violation violation) {
  switch (violation) {
    case Violation::MissingReasoningTag: return "MissingReasoningTag";
    case Violation::MissingDiagnosisTag: return "MissingDiagnosisTag";
    case Violation::MissingConfidenceTag: return "MissingConfidenceTag";
    case Violation::InvalidDiagnosisValue: return "InvalidDiagnosisValue";
    case Violation::InvalidConfidenceValue: return "InvalidConfidenceValue";
    case Violation::TagsOutOfOrder: return "TagsOutOfOrder";
    case Violation::DuplicateTag: return "DuplicateTag";
  }
  throw std::logic_error("unhandled Violation");
}

namespace {

enum class TagKind { Reasoning = 0, Diagnosis = 1, Confidence = 2 };

struct Line {
  std::size_t begin;  // offset into text
  std::size_t end;    // exclusive, before the '\n'
  std::optional<TagKind> tag;
  std::size_t body_begin = 0;  // offset just past the colon if tag
};

std::string_view trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

// Matches "<ws><word>:" at the start of a line, case-insensitive word.
std::optional<std::pair<TagKind, std::size_t>> match_tag(std::string_view line) {
  std::size_t i = 0;
  while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
  static constexpr std::pair<const char*, TagKind> kTags[] = {
      {"reasoning", TagKind::Reasoning},
      {"diagnosis", TagKind::Diagnosis},
      {"confidence", TagKind::Confidence},
  };
  for (const auto& [word, kind] : kTags) {
    std::size_t j = i;
    const char* p = word;
    while (*p != '\0' && j < line.size() &&
           std::tolower(static_cast<unsigned char>(line[j])) == *p) {
      ++j;
      ++p;
    }
    if (*p != '\0') continue;
    // Optional spaces between the word and the colon.
    std::size_t k = j;
    while (k < line.size() && (line[k] == ' ' || line[k] == '\t')) ++k;
    if (k < line.size() && line[k] == ':') return std::make_pair(kind, k + 1);
  }
  return std::nullopt;
}

// Counts whole-word, case-sensitive label tokens; returns the label when the
// total count is exactly one.
std::optional<DiagnosisLabel> extract_single_label(std::string_view body) {
  static constexpr std::pair<const char*, DiagnosisLabel> kLabels[] = {
      {"CN", DiagnosisLabel::CN},
      {"MCI", DiagnosisLabel::MCI},
      {"Dementia", DiagnosisLabel::Dementia},
  };
  int total = 0;
  std::optional<DiagnosisLabel> found;
  auto is_word = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; };
  for (const auto& [token, label] : kLabels) {
    std::string_view needle(token);
    std::size_t pos = 0;
    while ((pos = body.find(needle, pos)) != std::string_view::npos) {
      bool left_ok = pos == 0 || !is_word(body[pos - 1]);
      std::size_t after = pos + needle.size();
      bool right_ok = after >= body.size() || !is_word(body[after]);
      if (left_ok && right_ok) {
        ++total;
        found = label;
      }
      pos = after;
    }
  }
  if (total != 1) return std::nullopt;
  return found;
}

}  // namespace

ParseOutcome parse_output(std::string_view text) {
  std::vector<Line> lines;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::size_t end = nl == std::string_view::npos ? text.size() : nl;
    Line line{pos, end, std::nullopt, 0};
    std::string_view view = text.substr(pos, end - pos);
    if (!view.empty() && view.back() == '\r') view.remove_suffix(1);
    if (auto tag = match_tag(view)) {
      line.tag = tag->first;
      line.body_begin = pos + tag->second;
    }
    lines.push_back(line);
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }

  std::vector<std::size_t> occurrences[3];
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].tag) occurrences[static_cast<int>(*lines[i].tag)].push_back(i);
  }

  ParseOutcome outcome;
  static constexpr Violation kMissing[3] = {Violation::MissingReasoningTag,
                                            Violation::MissingDiagnosisTag,
                                            Violation::MissingConfidenceTag};
  for (int k = 0; k < 3; ++k) {
    if (occurrences[k].empty()) outcome.violations.push_back(kMissing[k]);
  }
  for (int k = 0; k < 3; ++k) {
    if (occurrences[k].size() > 1) outcome.violations.push_back(Violation::DuplicateTag);
  }
  if (!outcome.violations.empty()) return outcome;

  std::size_t r = occurrences[0][0], d = occurrences[1][0], c = occurrences[2][0];
  if (!(r < d && d < c)) {
    outcome.violations.push_back(Violation::TagsOutOfOrder);
    return outcome;
  }

  // Bodies: reasoning runs to the Diagnosis line, diagnosis to the
  // Confidence line, confidence to end of text.
  auto body = [&](std::size_t from_line, std::size_t to_line) {
    std::size_t begin = lines[from_line].body_begin;
    std::size_t end = to_line < lines.size() ? lines[to_line].begin : text.size();
    if (end < begin) end = begin;
    return trim(text.substr(begin, end - begin));
  };
  std::string_view reasoning = body(r, d);
  std::string_view diagnosis_body = body(d, c);
  std::string_view confidence_body = body(c, lines.size());

  if (reasoning.empty()) {
    outcome.violations.push_back(Violation::MissingReasoningTag);
    return outcome;
  }
  auto label = extract_single_label(diagnosis_body);
  if (!label) outcome.violations.push_back(Violation::InvalidDiagnosisValue);
  auto confidence = parse_confidence(confidence_body);
  if (!confidence) outcome.violations.push_back(Violation::InvalidConfidenceValue);
  if (!outcome.violations.empty()) return outcome;

  outcome.output = DiagnosticOutput{std::string(reasoning), *label, *confidence};
  return outcome;
}

double format_reward(std::string_view text) { return parse_output(text).ok() ? 1.0 : 0.0; }

std::string render_output(const DiagnosticOutput& output) {
  return "Reasoning: " + output.reasoning + "\nDiagnosis: " + to_string(output.diagnosis) +
         "\nConfidence: " + to_string(output.confidence);
}

}  // namespace advr
