#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace advr::text {

// One phrase to search for; `owner` is an opaque caller tag carried through
// to the match so multiple lexicons can share a single pass.
struct Phrase {
  std::string text;
  std::size_t owner = 0;
};

struct MatchSpan {
  std::size_t begin = 0;  // byte offsets into the searched text
  std::size_t end = 0;
  std::string term;       // the phrase as registered (not the matched bytes)
  std::size_t owner = 0;

  friend bool operator==(const MatchSpan&, const MatchSpan&) = default;
};

// Case-insensitive (ASCII) whole-word phrase matching. Scans left to right;
// at each position the longest matching phrase wins and its span is consumed,
// so each text span is credited at most once per pass. Word boundaries are
// non-alphanumeric characters or the text edges.
std::vector<MatchSpan> find_matches(std::string_view text, const std::vector<Phrase>& phrases);

bool contains_term(std::string_view text, std::string_view term);

// Byte ranges of sentences; split on '.', '!', '?', ';' and newlines.
std::vector<std::pair<std::size_t, std::size_t>> split_sentences(std::string_view text);

std::string to_lower_ascii(std::string_view text);

}  // namespace advr::text
