#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "advr/domain.hpp"
#include "advr/output_schema.hpp"
#include "advr/text_match.hpp"

namespace advr {

struct BiomarkerLexicon {
  std::vector<std::string> synonyms;
  std::vector<std::string> normal_terms;
  std::vector<std::string> abnormal_terms;
};

struct DomainLexicon {
  std::vector<std::string> domain_terms;
  std::map<std::string, std::vector<std::string>> subdomains;  // name -> terms
};

inline constexpr const char* kBiomarkerNames[] = {"Abeta", "tTau", "pTau"};
inline constexpr const char* kCognitiveDomains[] = {"memory", "executive", "visuospatial",
                                                    "language"};

// Swappable scoring vocabulary. Scoring behaviour is a pure function of
// (output, gold, visit, ranges, dictionary): changing diagnostic criteria is
// a dictionary swap, not a code change.
struct GuidelineDictionary {
  std::string name;  // "NIA-AA", "IWG-2", or a custom label
  // Informational for r_cat (the verifier matches the structured Diagnosis
  // tag), but validated: no keyword may appear under two labels.
  std::map<DiagnosisLabel, std::vector<std::string>> category_keywords;
  std::map<DiagnosisLabel, std::vector<std::string>> exclusion_terms;
  std::map<std::string, BiomarkerLexicon> biomarker_lexicon;  // all three biomarkers
  std::map<std::string, DomainLexicon> domain_lexicon;        // all four domains

  // Throws ConfigError naming the offending field.
  void validate() const;
};

GuidelineDictionary guideline_from_json(const nlohmann::json& doc);
GuidelineDictionary load_guideline_file(const std::string& path);

// Resolves "niaaa"/"iwg2" to the bundled defaults, anything else as a path.
GuidelineDictionary resolve_guideline(const std::string& selector);

// Rubric id -> spans credited for it. Ids: "category_match",
// "category_exclusion", "bio:<name>:mention", "bio:<name>:status",
// "feat:<domain>:domain", "feat:<domain>:subdomain". The category match is
// established on the structured Diagnosis tag rather than on free text, so
// its span is the zero-length (0,0) placeholder.
using EvidenceMap = std::map<std::string, std::vector<text::MatchSpan>>;

// 1.0 exact label match with no gold-label exclusion term in the reasoning;
// 0.5 match but an exclusion term is asserted; 0.0 mismatch.
double category_reward(const DiagnosticOutput& output, DiagnosisLabel gold,
                       const GuidelineDictionary& dict, EvidenceMap* evidence = nullptr);

// (1/3) * sum over biomarkers of (0.5*mentioned + 0.5*status_correct).
// Mention is any synonym hit; the asserted status is the nearest
// normal/abnormal term in the first mention sentence carrying one, and it
// must match the visit's true status per the reference ranges. A null visit
// (or a biomarker without a value or range) earns no status credit.
double biomarker_reward(std::string_view reasoning, const SubjectVisit* visit,
                        const ReferenceRanges& ranges, const GuidelineDictionary& dict,
                        EvidenceMap* evidence = nullptr);

// (1/4) * sum over domains of (0.5*domain_mentioned + 0.5*subdomain_mentioned).
double feature_reward(std::string_view reasoning, const GuidelineDictionary& dict,
                      EvidenceMap* evidence = nullptr);

struct GuidelineScore {
  double r_cat = 0.0;
  double r_bio = 0.0;
  double r_feat = 0.0;
  double r_guideline = 0.0;  // 0.4*r_cat + 0.3*r_bio + 0.3*r_feat
  EvidenceMap evidence;
};

GuidelineScore guideline_reward(const DiagnosticOutput& output, DiagnosisLabel gold,
                                const SubjectVisit* visit, const ReferenceRanges& ranges,
                                const GuidelineDictionary& dict);

}  // namespace advr
