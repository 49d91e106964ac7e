#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "advr/domain.hpp"
#include "advr/output_schema.hpp"

namespace advr {

struct PredictionRecord {
  DiagnosisLabel predicted = DiagnosisLabel::CN;
  Confidence confidence = Confidence::Low;
  DiagnosisLabel gold = DiagnosisLabel::CN;
};

struct ConfusionMetrics {
  double accuracy = 0.0;            // percent
  std::optional<double> sensitivity;  // absent when no positive gold
  std::optional<double> specificity;  // absent when no negative gold
  int tp = 0, fn = 0, tn = 0, fp = 0;
  int dropped = 0;  // records the task excludes
};

// Binarizes records under `task` (visits outside the task are dropped and
// counted) and computes ACC = (TP+TN)/total, SEN = TP/(TP+FN),
// SPE = TN/(TN+FP), as percentages. Throws std::invalid_argument when no
// record survives binarization.
ConfusionMetrics confusion_metrics(const std::vector<PredictionRecord>& records, BinaryTask task);

// Ordinal score for a discrete (prediction, confidence) pair. Defaults
// interleave the bands monotonically: positive predictions score from
// confident-high down, negative predictions mirror below them.
struct ScoreMap {
  double positive_high = 1.0;
  double positive_medium = 0.84;
  double positive_low = 0.67;
  double negative_low = 0.33;
  double negative_medium = 0.16;
  double negative_high = 0.0;

  double score(BinaryClass predicted, Confidence confidence) const;
};

// Rank-based (Mann-Whitney) AUC as a percentage, midrank tie handling.
// Requires both gold classes present after binarization.
double auc(const std::vector<PredictionRecord>& records, BinaryTask task,
           const ScoreMap& map = ScoreMap{});

std::vector<std::string> whitespace_tokens(std::string_view text);

// Corpus-of-one BLEU: clipped n-gram precision geometric mean with brevity
// penalty, whitespace tokens, no case folding. The n-gram order is capped at
// the candidate token count so a short exact prefix is scored over the
// orders it can realize. Empty reference throws; empty candidate scores 0.
double bleu(std::string_view candidate, std::string_view reference, int max_n = 4);

// LCS-based F1 over whitespace tokens. Both texts must be non-empty.
double rouge_l(std::string_view candidate, std::string_view reference);

}  // namespace advr
