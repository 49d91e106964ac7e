#include "advr/grpo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace advr {

using nlohmann::json;

RewardBreakdown composite_reward(const std::string& text, DiagnosisLabel gold,
                                 const SubjectVisit* visit, const ReferenceRanges& ranges,
                                 const GuidelineDictionary& dict, EntailmentBackend& backend,
                                 const DiscretizeThresholds& thresholds) {
  RewardBreakdown b;
  ParseOutcome outcome = parse_output(text);
  if (outcome.ok()) {
    b.format_ok = true;
    b.r_format = 1.0;
    GuidelineScore score = guideline_reward(*outcome.output, gold, visit, ranges, dict);
    b.r_cat = score.r_cat;
    b.r_bio = score.r_bio;
    b.r_feat = score.r_feat;
    b.r_guideline = score.r_guideline;
    b.evidence = std::move(score.evidence);
    b.r_consistency = consistency_reward(backend, *outcome.output, thresholds);
  } else {
    b.violations = outcome.violations;
    b.r_bio = biomarker_reward(text, visit, ranges, dict, &b.evidence);
    b.r_feat = feature_reward(text, dict, &b.evidence);
    b.r_guideline = 0.4 * b.r_cat + 0.3 * b.r_bio + 0.3 * b.r_feat;
  }
  b.composite = b.r_format + b.r_guideline + b.r_consistency;
  return b;
}

json breakdown_to_json(const RewardBreakdown& breakdown) {
  json evidence = json::object();
  for (const auto& [rubric, spans] : breakdown.evidence) {
    json arr = json::array();
    for (const auto& span : spans) {
      arr.push_back(json{{"begin", span.begin}, {"end", span.end}, {"term", span.term}});
    }
    evidence[rubric] = std::move(arr);
  }
  json violations = json::array();
  for (Violation v : breakdown.violations) violations.push_back(to_string(v));
  return json{{"format_ok", breakdown.format_ok},
              {"r_format", breakdown.r_format},
              {"r_cat", breakdown.r_cat},
              {"r_bio", breakdown.r_bio},
              {"r_feat", breakdown.r_feat},
              {"r_guideline", breakdown.r_guideline},
              {"r_consistency", breakdown.r_consistency},
              {"composite", breakdown.composite},
              {"evidence", evidence},
              {"violations", violations}};
}

AdvantageVector normalize_group(const std::vector<double>& rewards, double epsilon) {
  if (rewards.size() < 2) throw std::invalid_argument("group size must be at least 2");
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  for (double r : rewards) {
    if (!std::isfinite(r)) throw std::invalid_argument("rewards must be finite");
  }
  AdvantageVector out;
  out.epsilon = epsilon;
  const double n = static_cast<double>(rewards.size());

  auto [lo, hi] = std::minmax_element(rewards.begin(), rewards.end());
  if (*lo == *hi) {
    // Constant group: zero variance, advantages exactly zero regardless of
    // the epsilon guard.
    out.mu_r = *lo;
    out.sigma_r = 0.0;
    out.values.assign(rewards.size(), 0.0);
    return out;
  }

  double mean = 0.0;
  for (double r : rewards) mean += r;
  mean /= n;
  // Second pass re-centers the mean so sum(r - mu) cancels to the last bit.
  double residual = 0.0;
  for (double r : rewards) residual += r - mean;
  double mu = mean + residual / n;

  double var = 0.0;
  for (double r : rewards) var += (r - mu) * (r - mu);
  var /= n;
  double sigma = std::sqrt(var);

  out.mu_r = mu;
  out.sigma_r = sigma;
  out.values.reserve(rewards.size());
  const double denom = sigma + epsilon;
  for (double r : rewards) out.values.push_back((r - mu) / denom);
  return out;
}

double sequence_kl(const std::vector<double>& policy_logprobs,
                   const std::vector<double>& ref_logprobs) {
  if (policy_logprobs.size() != ref_logprobs.size()) {
    throw std::invalid_argument("log-prob sequences must have equal length");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < policy_logprobs.size(); ++i) {
    sum += policy_logprobs[i] - ref_logprobs[i];
  }
  return sum;
}

double rlvr_objective(const std::vector<double>& rewards, const std::vector<double>& kls,
                      double beta) {
  if (rewards.empty()) throw std::invalid_argument("objective needs at least one candidate");
  if (rewards.size() != kls.size()) {
    throw std::invalid_argument("rewards and kls must have equal length");
  }
  if (!(beta >= 0.0)) throw std::invalid_argument("beta must be >= 0");
  double sum = 0.0;
  for (std::size_t i = 0; i < rewards.size(); ++i) sum += rewards[i] - beta * kls[i];
  return sum / static_cast<double>(rewards.size());
}

}  // namespace advr
