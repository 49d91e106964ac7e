#include "advr/consistency.hpp"

#include <cmath>
#include <stdexcept>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "advr/errors.hpp"
#include "advr/text_match.hpp"

namespace advr {

using nlohmann::json;

void EntailmentScores::validate() const {
  for (double p : {entail, neutral, contradict}) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw std::invalid_argument("entailment probabilities must be in [0,1]");
    }
  }
  if (std::abs(entail + neutral + contradict - 1.0) > 1e-6) {
    throw std::invalid_argument("entailment probabilities must sum to 1");
  }
}

ParsedUrl parse_url(const std::string& url) {
  if (url.rfind("https://", 0) == 0) {
    throw ConfigError("url", "https endpoints are not supported; use http");
  }
  if (url.rfind("http://", 0) != 0) {
    throw ConfigError("url", "expected an http:// url, got '" + url + "'");
  }
  std::size_t authority = 7;  // past "http://"
  std::size_t slash = url.find('/', authority);
  if (slash == authority) throw ConfigError("url", "missing host in '" + url + "'");
  ParsedUrl out;
  if (slash == std::string::npos) {
    out.base = url;
    out.path = "/";
  } else {
    out.base = url.substr(0, slash);
    out.path = url.substr(slash);
  }
  if (out.base.size() <= 7) throw ConfigError("url", "missing host in '" + url + "'");
  return out;
}

namespace {

void require_nonempty(const std::string& value, const char* what) {
  if (value.find_first_not_of(" \t\r\n") == std::string::npos) {
    throw std::invalid_argument(std::string(what) + " must be non-empty");
  }
}

constexpr std::size_t kNoLabel = static_cast<std::size_t>(-1);

const std::vector<text::Phrase>& label_cues() {
  static const std::vector<text::Phrase> cues = {
      {"cn", 0},
      {"cognitively normal", 0},
      {"normal cognition", 0},
      {"mci", 1},
      {"mild cognitive impairment", 1},
      {"dementia", 2},
      {"alzheimer's dementia", 2},
  };
  return cues;
}

const std::vector<text::Phrase>& negation_cues() {
  static const std::vector<text::Phrase> cues = {
      {"not", 0},       {"no", 0},       {"without", 0},    {"rule out", 0}, {"rules out", 0},
      {"ruled out", 0}, {"unlikely", 0}, {"absence of", 0}, {"excluded", 0},
  };
  return cues;
}

// Labels asserted affirmatively: cue present with no negation word earlier in
// the same sentence.
void asserted_labels(const std::string& text, bool (&asserted)[3]) {
  auto matches = text::find_matches(text, label_cues());
  auto negations = text::find_matches(text, negation_cues());
  auto sentences = text::split_sentences(text);
  for (const auto& match : matches) {
    std::pair<std::size_t, std::size_t> sentence{0, text.size()};
    for (const auto& range : sentences) {
      if (match.begin >= range.first && match.begin < range.second) {
        sentence = range;
        break;
      }
    }
    bool negated = false;
    for (const auto& neg : negations) {
      if (neg.begin >= sentence.first && neg.end <= match.begin) {
        negated = true;
        break;
      }
    }
    if (!negated) asserted[match.owner] = true;
  }
}

std::size_t hypothesis_label(const std::string& hypothesis) {
  auto matches = text::find_matches(hypothesis, label_cues());
  if (matches.empty()) return kNoLabel;
  return matches.front().owner;
}

}  // namespace

EntailmentScores LexicalFallbackBackend::entailment_probs(const std::string& premise,
                                                          const std::string& hypothesis) {
  require_nonempty(premise, "premise");
  require_nonempty(hypothesis, "hypothesis");
  std::size_t target = hypothesis_label(hypothesis);
  if (target == kNoLabel) return EntailmentScores{0.1, 0.8, 0.1};
  bool asserted[3] = {false, false, false};
  asserted_labels(premise, asserted);
  if (asserted[target]) return EntailmentScores{0.9, 0.05, 0.05};
  for (std::size_t i = 0; i < 3; ++i) {
    if (i != target && asserted[i]) return EntailmentScores{0.05, 0.05, 0.9};
  }
  return EntailmentScores{0.1, 0.8, 0.1};
}

RemoteEntailmentBackend::RemoteEntailmentBackend(const std::string& url, int timeout_ms,
                                                 int max_in_flight)
    : url_(parse_url(url)), timeout_ms_(timeout_ms), slots_(max_in_flight) {
  if (timeout_ms <= 0) throw ConfigError("timeout", "must be positive");
  if (max_in_flight <= 0) throw ConfigError("concurrency_bound", "must be positive");
}

EntailmentScores RemoteEntailmentBackend::entailment_probs(const std::string& premise,
                                                           const std::string& hypothesis) {
  require_nonempty(premise, "premise");
  require_nonempty(hypothesis, "hypothesis");
  auto key = std::make_pair(premise, hypothesis);
  {
    std::lock_guard lock(cache_mutex_);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  }

  json reply;
  {
    SlotGuard slot(slots_);
    httplib::Client client(url_.base);
    client.set_connection_timeout(timeout_ms_ / 1000, (timeout_ms_ % 1000) * 1000);
    client.set_read_timeout(timeout_ms_ / 1000, (timeout_ms_ % 1000) * 1000);
    client.set_write_timeout(timeout_ms_ / 1000, (timeout_ms_ % 1000) * 1000);
    json body{{"premise", premise}, {"hypothesis", hypothesis}};
    auto res = client.Post(url_.path, body.dump(), "application/json");
    if (!res) throw BackendError("entailment request failed", httplib::to_string(res.error()));
    if (res->status < 200 || res->status >= 300) {
      throw BackendError("entailment request failed",
                         "http status " + std::to_string(res->status));
    }
    try {
      reply = json::parse(res->body);
    } catch (const json::exception& e) {
      throw BackendError("entailment reply unparsable", e.what());
    }
  }

  EntailmentScores scores;
  for (const char* field : {"entail", "neutral", "contradict"}) {
    if (!reply.contains(field) || !reply.at(field).is_number()) {
      throw BackendError("entailment reply malformed", std::string("missing field ") + field);
    }
  }
  scores.entail = reply.at("entail").get<double>();
  scores.neutral = reply.at("neutral").get<double>();
  scores.contradict = reply.at("contradict").get<double>();
  try {
    scores.validate();
  } catch (const std::invalid_argument& e) {
    throw BackendError("entailment reply malformed", e.what());
  }

  std::lock_guard lock(cache_mutex_);
  cache_.emplace(std::move(key), scores);
  return scores;
}

void RemoteEntailmentBackend::clear_cache() {
  std::lock_guard lock(cache_mutex_);
  cache_.clear();
}

double discretize(const EntailmentScores& scores, const DiscretizeThresholds& thresholds) {
  scores.validate();
  if (!(thresholds.contradict_min > 0.0 && thresholds.contradict_min <= 1.0) ||
      !(thresholds.entail_min > 0.0 && thresholds.entail_min <= 1.0)) {
    throw std::invalid_argument("thresholds must be in (0,1]");
  }
  if (scores.contradict >= thresholds.contradict_min) return 0.0;
  if (scores.entail >= thresholds.entail_min) return 1.0;
  return 0.5;
}

std::string diagnosis_hypothesis(DiagnosisLabel label) {
  return "The diagnosis is " + to_string(label) + ".";
}

double consistency_reward(EntailmentBackend& backend, const DiagnosticOutput& output,
                          const DiscretizeThresholds& thresholds) {
  return discretize(backend.entailment_probs(output.reasoning,
                                             diagnosis_hypothesis(output.diagnosis)),
                    thresholds);
}

}  // namespace advr
