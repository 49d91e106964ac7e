#pragma once

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "advr/consistency.hpp"
#include "advr/guideline.hpp"

namespace advr {

// Composite verifiable reward: format + guideline adherence + consistency,
// in [0, 3].
struct RewardBreakdown {
  bool format_ok = false;
  double r_format = 0.0;       // {0, 1}
  double r_cat = 0.0;          // [0, 1]
  double r_bio = 0.0;          // [0, 1]
  double r_feat = 0.0;         // [0, 1]
  double r_guideline = 0.0;    // 0.4*r_cat + 0.3*r_bio + 0.3*r_feat
  double r_consistency = 0.0;  // {0, 0.5, 1}
  double composite = 0.0;      // r_format + r_guideline + r_consistency
  EvidenceMap evidence;
  std::vector<Violation> violations;  // empty when format_ok
};

// Scores one candidate response. On a format violation the guideline terms
// are still computed over the raw text, but the category and consistency
// terms are 0: there is no trustworthy diagnosis to match or entail. A null
// visit disables biomarker status credit.
RewardBreakdown composite_reward(const std::string& text, DiagnosisLabel gold,
                                 const SubjectVisit* visit, const ReferenceRanges& ranges,
                                 const GuidelineDictionary& dict, EntailmentBackend& backend,
                                 const DiscretizeThresholds& thresholds = DiscretizeThresholds{});

nlohmann::json breakdown_to_json(const RewardBreakdown& breakdown);

struct AdvantageVector {
  std::vector<double> values;
  double mu_r = 0.0;     // group mean
  double sigma_r = 0.0;  // population standard deviation (divisor G)
  double epsilon = 0.0;
};

// Group-relative advantages (r_i - mu) / (sigma + epsilon). A zero-variance
// group maps to exact zeros. Requires G >= 2, epsilon > 0, finite rewards.
AdvantageVector normalize_group(const std::vector<double>& rewards, double epsilon = 1e-8);

// Sampled per-sequence KL estimate: sum_t (policy_t - ref_t) over token
// log-probs. Equal lengths required; empty sequences sum to 0.
double sequence_kl(const std::vector<double>& policy_logprobs,
                   const std::vector<double>& ref_logprobs);

// mean_i (reward_i - beta * kl_i). Requires equal non-zero lengths, beta >= 0.
double rlvr_objective(const std::vector<double>& rewards, const std::vector<double>& kls,
                      double beta);

}  // namespace advr
