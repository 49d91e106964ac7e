#include "advr/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <stdexcept>

namespace advr {

ConfusionMetrics confusion_metrics(const std::vector<PredictionRecord>& records, BinaryTask task) {
  ConfusionMetrics m;
  for (const auto& record : records) {
    auto gold = binarize_label(task, record.gold);
    auto predicted = binarize_label(task, record.predicted);
    if (!gold || !predicted) {
      ++m.dropped;
      continue;
    }
    if (*gold == BinaryClass::Positive) {
      (*predicted == BinaryClass::Positive) ? ++m.tp : ++m.fn;
    } else {
      (*predicted == BinaryClass::Negative) ? ++m.tn : ++m.fp;
    }
  }
  int total = m.tp + m.fn + m.tn + m.fp;
  if (total == 0) throw std::invalid_argument("no records remain after binarization");
  m.accuracy = 100.0 * (m.tp + m.tn) / total;
  if (m.tp + m.fn > 0) m.sensitivity = 100.0 * m.tp / (m.tp + m.fn);
  if (m.tn + m.fp > 0) m.specificity = 100.0 * m.tn / (m.tn + m.fp);
  return m;
}

double ScoreMap::score(BinaryClass predicted, Confidence confidence) const {
  if (predicted == BinaryClass::Positive) {
    switch (confidence) {
      case Confidence::High: return positive_high;
      case Confidence::Medium: return positive_medium;
      case Confidence::Low: return positive_low;
    }
  } else {
    switch (confidence) {
      case Confidence::High: return negative_high;
      case Confidence::Medium: return negative_medium;
      case Confidence::Low: return negative_low;
    }
  }
  throw std::logic_error("unhandled Confidence");
}

double auc(const std::vector<PredictionRecord>& records, BinaryTask task, const ScoreMap& map) {
  struct Scored {
    double score;
    bool positive;
  };
  std::vector<Scored> scored;
  for (const auto& record : records) {
    auto gold = binarize_label(task, record.gold);
    auto predicted = binarize_label(task, record.predicted);
    if (!gold || !predicted) continue;
    scored.push_back(Scored{map.score(*predicted, record.confidence),
                            *gold == BinaryClass::Positive});
  }
  std::size_t n_pos = 0, n_neg = 0;
  for (const auto& s : scored) (s.positive ? n_pos : n_neg)++;
  if (n_pos == 0 || n_neg == 0) {
    throw std::invalid_argument("auc needs both gold classes present");
  }

  // Mann-Whitney via midranks: ties contribute half wins.
  std::sort(scored.begin(), scored.end(),
            [](const Scored& a, const Scored& b) { return a.score < b.score; });
  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < scored.size()) {
    std::size_t j = i;
    while (j < scored.size() && scored[j].score == scored[i].score) ++j;
    double midrank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));  // 1-based
    for (std::size_t k = i; k < j; ++k) {
      if (scored[k].positive) rank_sum_pos += midrank;
    }
    i = j;
  }
  double np = static_cast<double>(n_pos), nn = static_cast<double>(n_neg);
  double u = rank_sum_pos - np * (np + 1.0) / 2.0;
  return 100.0 * u / (np * nn);
}

std::vector<std::string> whitespace_tokens(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i > start) tokens.emplace_back(text.substr(start, i - start));
  }
  return tokens;
}

namespace {

std::map<std::vector<std::string>, int> ngram_counts(const std::vector<std::string>& tokens,
                                                     int n) {
  std::map<std::vector<std::string>, int> counts;
  if (static_cast<int>(tokens.size()) < n) return counts;
  for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= tokens.size(); ++i) {
    counts[std::vector<std::string>(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                                    tokens.begin() + static_cast<std::ptrdiff_t>(i) + n)]++;
  }
  return counts;
}

}  // namespace

double bleu(std::string_view candidate, std::string_view reference, int max_n) {
  if (max_n < 1) throw std::invalid_argument("max_n must be at least 1");
  auto ref = whitespace_tokens(reference);
  if (ref.empty()) throw std::invalid_argument("reference must be non-empty");
  auto cand = whitespace_tokens(candidate);
  if (cand.empty()) return 0.0;

  int effective_n = std::min<int>(max_n, static_cast<int>(cand.size()));
  double log_precision_sum = 0.0;
  for (int n = 1; n <= effective_n; ++n) {
    auto cand_counts = ngram_counts(cand, n);
    auto ref_counts = ngram_counts(ref, n);
    long clipped = 0, total = 0;
    for (const auto& [gram, count] : cand_counts) {
      total += count;
      auto it = ref_counts.find(gram);
      if (it != ref_counts.end()) clipped += std::min(count, it->second);
    }
    if (total == 0 || clipped == 0) return 0.0;
    log_precision_sum += std::log(static_cast<double>(clipped) / static_cast<double>(total));
  }
  double geo_mean = std::exp(log_precision_sum / effective_n);

  double c = static_cast<double>(cand.size());
  double r = static_cast<double>(ref.size());
  double brevity = c >= r ? 1.0 : std::exp(1.0 - r / c);
  return brevity * geo_mean;
}

double rouge_l(std::string_view candidate, std::string_view reference) {
  auto cand = whitespace_tokens(candidate);
  auto ref = whitespace_tokens(reference);
  if (cand.empty() || ref.empty()) throw std::invalid_argument("texts must be non-empty");

  std::vector<std::vector<int>> lcs(cand.size() + 1, std::vector<int>(ref.size() + 1, 0));
  for (std::size_t i = 1; i <= cand.size(); ++i) {
    for (std::size_t j = 1; j <= ref.size(); ++j) {
      lcs[i][j] = cand[i - 1] == ref[j - 1] ? lcs[i - 1][j - 1] + 1
                                            : std::max(lcs[i - 1][j], lcs[i][j - 1]);
    }
  }
  int common = lcs[cand.size()][ref.size()];
  if (common == 0) return 0.0;
  double precision = static_cast<double>(common) / static_cast<double>(cand.size());
  double recall = static_cast<double>(common) / static_cast<double>(ref.size());
  return 2.0 * precision * recall / (precision + recall);
}

}  // namespace advr
