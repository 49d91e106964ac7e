#include "advr/guideline.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "advr/builtin_data.hpp"
#include "advr/errors.hpp"
#include "advr/report.hpp"

namespace advr {

using nlohmann::json;

namespace {

void require_field(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw ConfigError(field, what);
}

std::vector<std::string> string_list(const json& doc, const std::string& field) {
  require_field(doc.is_array(), field, "expected an array of strings");
  std::vector<std::string> out;
  for (const auto& item : doc) {
    require_field(item.is_string(), field, "expected an array of strings");
    out.push_back(item.get<std::string>());
  }
  return out;
}

std::map<DiagnosisLabel, std::vector<std::string>> label_lists(const json& doc,
                                                               const std::string& field) {
  require_field(doc.is_object(), field, "expected an object keyed by diagnosis label");
  std::map<DiagnosisLabel, std::vector<std::string>> out;
  for (const auto& [key, value] : doc.items()) {
    auto label = parse_diagnosis_label(key);
    require_field(label.has_value(), field, "unknown label '" + key + "'");
    out[*label] = string_list(value, field + "." + key);
  }
  return out;
}

}  // namespace

void GuidelineDictionary::validate() const {
  require_field(!name.empty(), "name", "must be non-empty");
  for (DiagnosisLabel label : kAllLabels) {
    auto it = category_keywords.find(label);
    require_field(it != category_keywords.end(), "category_keywords",
                  "missing label " + to_string(label));
    require_field(!it->second.empty(), "category_keywords",
                  "keyword list for " + to_string(label) + " must be non-empty");
    require_field(exclusion_terms.count(label) == 1, "exclusion_terms",
                  "missing label " + to_string(label));
  }
  // A keyword under two labels would make the category signal ambiguous.
  std::map<std::string, DiagnosisLabel> seen;
  for (const auto& [label, keywords] : category_keywords) {
    for (const auto& keyword : keywords) {
      require_field(!keyword.empty(), "category_keywords", "empty keyword");
      std::string folded = text::to_lower_ascii(keyword);
      auto [it, inserted] = seen.emplace(folded, label);
      if (!inserted && it->second != label) {
        throw ConfigError("category_keywords", "keyword '" + keyword + "' appears under both " +
                                                   to_string(it->second) + " and " +
                                                   to_string(label));
      }
    }
  }
  for (const char* name_c : kBiomarkerNames) {
    auto it = biomarker_lexicon.find(name_c);
    require_field(it != biomarker_lexicon.end(), "biomarker_lexicon",
                  std::string("missing biomarker ") + name_c);
    require_field(!it->second.synonyms.empty(), "biomarker_lexicon",
                  std::string(name_c) + ": synonyms must be non-empty");
    require_field(!it->second.normal_terms.empty(), "biomarker_lexicon",
                  std::string(name_c) + ": normal_terms must be non-empty");
    require_field(!it->second.abnormal_terms.empty(), "biomarker_lexicon",
                  std::string(name_c) + ": abnormal_terms must be non-empty");
  }
  for (const char* domain : kCognitiveDomains) {
    auto it = domain_lexicon.find(domain);
    require_field(it != domain_lexicon.end(), "domain_lexicon",
                  std::string("missing domain ") + domain);
    require_field(!it->second.domain_terms.empty(), "domain_lexicon",
                  std::string(domain) + ": domain_terms must be non-empty");
    require_field(!it->second.subdomains.empty(), "domain_lexicon",
                  std::string(domain) + ": at least one subdomain required");
    for (const auto& [sub, terms] : it->second.subdomains) {
      require_field(!terms.empty(), "domain_lexicon",
                    std::string(domain) + "." + sub + ": term list must be non-empty");
    }
  }
}

GuidelineDictionary guideline_from_json(const json& doc) {
  require_field(doc.is_object(), "guideline", "expected an object");
  require_field(doc.value("schema_version", 0) == 1, "schema_version", "expected 1");
  GuidelineDictionary dict;
  dict.name = doc.value("name", "");
  require_field(doc.contains("category_keywords"), "category_keywords", "missing");
  dict.category_keywords = label_lists(doc.at("category_keywords"), "category_keywords");
  require_field(doc.contains("exclusion_terms"), "exclusion_terms", "missing");
  dict.exclusion_terms = label_lists(doc.at("exclusion_terms"), "exclusion_terms");

  require_field(doc.contains("biomarker_lexicon") && doc.at("biomarker_lexicon").is_object(),
                "biomarker_lexicon", "expected an object");
  for (const auto& [name, entry] : doc.at("biomarker_lexicon").items()) {
    std::string field = "biomarker_lexicon." + name;
    require_field(entry.is_object(), field, "expected an object");
    BiomarkerLexicon lex;
    require_field(entry.contains("synonyms"), field, "missing synonyms");
    lex.synonyms = string_list(entry.at("synonyms"), field + ".synonyms");
    require_field(entry.contains("normal_terms"), field, "missing normal_terms");
    lex.normal_terms = string_list(entry.at("normal_terms"), field + ".normal_terms");
    require_field(entry.contains("abnormal_terms"), field, "missing abnormal_terms");
    lex.abnormal_terms = string_list(entry.at("abnormal_terms"), field + ".abnormal_terms");
    dict.biomarker_lexicon[name] = std::move(lex);
  }

  require_field(doc.contains("domain_lexicon") && doc.at("domain_lexicon").is_object(),
                "domain_lexicon", "expected an object");
  for (const auto& [name, entry] : doc.at("domain_lexicon").items()) {
    std::string field = "domain_lexicon." + name;
    require_field(entry.is_object(), field, "expected an object");
    DomainLexicon lex;
    require_field(entry.contains("domain_terms"), field, "missing domain_terms");
    lex.domain_terms = string_list(entry.at("domain_terms"), field + ".domain_terms");
    if (entry.contains("subdomains")) {
      require_field(entry.at("subdomains").is_object(), field + ".subdomains",
                    "expected an object");
      for (const auto& [sub, terms] : entry.at("subdomains").items()) {
        lex.subdomains[sub] = string_list(terms, field + ".subdomains." + sub);
      }
    }
    dict.domain_lexicon[name] = std::move(lex);
  }

  dict.validate();
  return dict;
}

GuidelineDictionary load_guideline_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path, "cannot open for reading");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError(path, e.what());
  }
  return guideline_from_json(doc);
}

GuidelineDictionary resolve_guideline(const std::string& selector) {
  if (selector == "niaaa" || selector == "iwg2") {
    return guideline_from_json(json::parse(builtin_guideline_json(selector)));
  }
  return load_guideline_file(selector);
}

double category_reward(const DiagnosticOutput& output, DiagnosisLabel gold,
                       const GuidelineDictionary& dict, EvidenceMap* evidence) {
  if (output.diagnosis != gold) return 0.0;
  if (evidence) {
    (*evidence)["category_match"].push_back(text::MatchSpan{0, 0, to_string(gold), 0});
  }
  std::vector<text::Phrase> phrases;
  if (auto it = dict.exclusion_terms.find(gold); it != dict.exclusion_terms.end()) {
    for (const auto& term : it->second) phrases.push_back(text::Phrase{term, 0});
  }
  auto spans = text::find_matches(output.reasoning, phrases);
  if (!spans.empty()) {
    if (evidence) (*evidence)["category_exclusion"] = spans;
    return 0.5;
  }
  return 1.0;
}

namespace {

// Sentence range containing byte offset `pos`.
std::pair<std::size_t, std::size_t> sentence_of(
    const std::vector<std::pair<std::size_t, std::size_t>>& sentences, std::size_t pos) {
  for (const auto& range : sentences) {
    if (pos >= range.first && pos < range.second) return range;
  }
  return {0, 0};
}

}  // namespace

double biomarker_reward(std::string_view reasoning, const SubjectVisit* visit,
                        const ReferenceRanges& ranges, const GuidelineDictionary& dict,
                        EvidenceMap* evidence) {
  // One combined pass over every synonym so overlapping names ("tau" inside
  // "phosphorylated tau") resolve longest-first instead of double-crediting.
  std::vector<text::Phrase> phrases;
  for (std::size_t b = 0; b < std::size(kBiomarkerNames); ++b) {
    const auto& lex = dict.biomarker_lexicon.at(kBiomarkerNames[b]);
    for (const auto& synonym : lex.synonyms) phrases.push_back(text::Phrase{synonym, b});
  }
  auto mention_spans = text::find_matches(reasoning, phrases);
  auto sentences = text::split_sentences(reasoning);

  double credit_total = 0.0;
  for (std::size_t b = 0; b < std::size(kBiomarkerNames); ++b) {
    const std::string name = kBiomarkerNames[b];
    const auto& lex = dict.biomarker_lexicon.at(name);
    std::vector<const text::MatchSpan*> mentions;
    for (const auto& span : mention_spans) {
      if (span.owner == b) mentions.push_back(&span);
    }
    if (mentions.empty()) continue;
    credit_total += 0.5;
    if (evidence) (*evidence)["bio:" + name + ":mention"].push_back(*mentions.front());

    // Asserted status: nearest status term in the first mention sentence that
    // carries one.
    std::vector<text::Phrase> status_phrases;
    for (const auto& term : lex.normal_terms) status_phrases.push_back(text::Phrase{term, 0});
    for (const auto& term : lex.abnormal_terms) status_phrases.push_back(text::Phrase{term, 1});
    std::optional<BiomarkerStatus> asserted;
    text::MatchSpan asserted_span;
    for (const auto* mention : mentions) {
      auto range = sentence_of(sentences, mention->begin);
      if (range.second <= range.first) continue;
      auto hits = text::find_matches(reasoning.substr(range.first, range.second - range.first),
                                     status_phrases);
      if (hits.empty()) continue;
      const text::MatchSpan* best = nullptr;
      auto distance = [&](const text::MatchSpan& hit) {
        std::size_t at = range.first + hit.begin;
        return at > mention->begin ? at - mention->begin : mention->begin - at;
      };
      for (const auto& hit : hits) {
        if (!best || distance(hit) < distance(*best)) best = &hit;
      }
      asserted = best->owner == 0 ? BiomarkerStatus::Normal : BiomarkerStatus::Abnormal;
      asserted_span = *best;
      asserted_span.begin += range.first;
      asserted_span.end += range.first;
      break;
    }
    if (!asserted) continue;

    // True status needs both a measured value and a reference range.
    if (visit == nullptr) continue;
    auto value = visit->biomarkers.find(name);
    auto range = ranges.find(name);
    if (value == visit->biomarkers.end() || range == ranges.end()) continue;
    if (classify_biomarker(value->second, range->second) == *asserted) {
      credit_total += 0.5;
      if (evidence) (*evidence)["bio:" + name + ":status"].push_back(asserted_span);
    }
  }
  return credit_total / 3.0;
}

double feature_reward(std::string_view reasoning, const GuidelineDictionary& dict,
                      EvidenceMap* evidence) {
  std::vector<text::Phrase> domain_phrases;
  std::vector<text::Phrase> subdomain_phrases;
  for (std::size_t d = 0; d < std::size(kCognitiveDomains); ++d) {
    const auto& lex = dict.domain_lexicon.at(kCognitiveDomains[d]);
    for (const auto& term : lex.domain_terms) domain_phrases.push_back(text::Phrase{term, d});
    for (const auto& [sub, terms] : lex.subdomains) {
      for (const auto& term : terms) subdomain_phrases.push_back(text::Phrase{term, d});
    }
  }
  // Separate passes: a subdomain phrase embedding the domain word
  // ("working memory") must not swallow the domain mention.
  auto domain_spans = text::find_matches(reasoning, domain_phrases);
  auto subdomain_spans = text::find_matches(reasoning, subdomain_phrases);

  double credit_total = 0.0;
  for (std::size_t d = 0; d < std::size(kCognitiveDomains); ++d) {
    const std::string domain = kCognitiveDomains[d];
    const text::MatchSpan* first_domain = nullptr;
    for (const auto& span : domain_spans) {
      if (span.owner == d) {
        first_domain = &span;
        break;
      }
    }
    const text::MatchSpan* first_sub = nullptr;
    for (const auto& span : subdomain_spans) {
      if (span.owner == d) {
        first_sub = &span;
        break;
      }
    }
    if (first_domain) {
      credit_total += 0.5;
      if (evidence) (*evidence)["feat:" + domain + ":domain"].push_back(*first_domain);
    }
    if (first_sub) {
      credit_total += 0.5;
      if (evidence) (*evidence)["feat:" + domain + ":subdomain"].push_back(*first_sub);
    }
  }
  return credit_total / 4.0;
}

GuidelineScore guideline_reward(const DiagnosticOutput& output, DiagnosisLabel gold,
                                const SubjectVisit* visit, const ReferenceRanges& ranges,
                                const GuidelineDictionary& dict) {
  GuidelineScore score;
  score.r_cat = category_reward(output, gold, dict, &score.evidence);
  score.r_bio = biomarker_reward(output.reasoning, visit, ranges, dict, &score.evidence);
  score.r_feat = feature_reward(output.reasoning, dict, &score.evidence);
  score.r_guideline = 0.4 * score.r_cat + 0.3 * score.r_bio + 0.3 * score.r_feat;
  return score;
}

}  // namespace advr
