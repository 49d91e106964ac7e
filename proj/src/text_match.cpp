#include "advr/text_match.hpp"

#include <algorithm>
#include <cctype>

namespace advr::text {

namespace {

bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0;
}

bool boundary_ok(std::string_view text, std::size_t begin, std::size_t end) {
  if (begin > 0 && is_word_char(text[begin - 1])) return false;
  if (end < text.size() && is_word_char(text[end])) return false;
  return true;
}

}  // namespace

std::string to_lower_ascii(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::vector<MatchSpan> find_matches(std::string_view text, const std::vector<Phrase>& phrases) {
  std::vector<MatchSpan> matches;
  if (text.empty() || phrases.empty()) return matches;

  const std::string haystack = to_lower_ascii(text);

  // Longest phrase first so e.g. "phosphorylated tau" is consumed before a
  // bare "tau" can match inside it.
  std::vector<std::size_t> order(phrases.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return phrases[a].text.size() > phrases[b].text.size();
  });

  std::vector<std::string> lowered(phrases.size());
  for (std::size_t i = 0; i < phrases.size(); ++i) lowered[i] = to_lower_ascii(phrases[i].text);

  std::size_t pos = 0;
  while (pos < haystack.size()) {
    bool matched = false;
    for (std::size_t idx : order) {
      const std::string& needle = lowered[idx];
      if (needle.empty() || pos + needle.size() > haystack.size()) continue;
      if (haystack.compare(pos, needle.size(), needle) != 0) continue;
      if (!boundary_ok(haystack, pos, pos + needle.size())) continue;
      matches.push_back({pos, pos + needle.size(), phrases[idx].text, phrases[idx].owner});
      pos += needle.size();
      matched = true;
      break;
    }
    if (!matched) ++pos;
  }
  return matches;
}

bool contains_term(std::string_view text, std::string_view term) {
  return !find_matches(text, {{std::string(term), 0}}).empty();
}

std::vector<std::pair<std::size_t, std::size_t>> split_sentences(std::string_view text) {
  std::vector<std::pair<std::size_t, std::size_t>> ranges;
  std::size_t start = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '.' || c == '!' || c == '?' || c == ';' || c == '\n') {
      if (i > start) ranges.emplace_back(start, i);
      start = i + 1;
    }
  }
  if (start < text.size()) ranges.emplace_back(start, text.size());
  return ranges;
}

}  // namespace advr::text
