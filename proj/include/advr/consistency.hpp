#pragma once

#include <map>
#include <mutex>
#include <semaphore>
#include <string>
#include <string_view>
#include <utility>

#include "advr/net.hpp"
#include "advr/output_schema.hpp"

namespace advr {

struct EntailmentScores {
  double entail = 0.0;
  double neutral = 0.0;
  double contradict = 0.0;

  // Each probability in [0,1], sum within 1e-6 of 1. Throws
  // std::invalid_argument.
  void validate() const;
};

// Reasoning -> diagnosis entailment provider. Implementations must be safe
// for concurrent calls.
class EntailmentBackend {
 public:
  virtual ~EntailmentBackend() = default;
  // Both texts non-empty. Implementations throw std::invalid_argument on
  // empty input and BackendError on transport failures.
  virtual EntailmentScores entailment_probs(const std::string& premise,
                                            const std::string& hypothesis) = 0;
};

// Deterministic offline stand-in for a neural entailment model. The
// hypothesis names a diagnosis label; the premise asserts labels through cue
// phrases unless a negation word precedes the cue in the same sentence.
// Hypothesis label asserted -> (0.9, 0.05, 0.05); a different label asserted
// -> (0.05, 0.05, 0.9); otherwise (0.1, 0.8, 0.1).
class LexicalFallbackBackend : public EntailmentBackend {
 public:
  EntailmentScores entailment_probs(const std::string& premise,
                                    const std::string& hypothesis) override;
};

// HTTP client for an external entailment service. POST {premise, hypothesis}
// to the url, reply {entail, neutral, contradict}. Replies are cached per
// (premise, hypothesis); concurrent requests are bounded by max_in_flight.
class RemoteEntailmentBackend : public EntailmentBackend {
 public:
  RemoteEntailmentBackend(const std::string& url, int timeout_ms, int max_in_flight);

  EntailmentScores entailment_probs(const std::string& premise,
                                    const std::string& hypothesis) override;

  // Drops memoized replies, e.g. at a batch boundary.
  void clear_cache();

 private:
  ParsedUrl url_;
  int timeout_ms_;
  std::counting_semaphore<> slots_;
  std::mutex cache_mutex_;
  std::map<std::pair<std::string, std::string>, EntailmentScores> cache_;
};

struct DiscretizeThresholds {
  double contradict_min = 0.5;
  double entail_min = 0.66;
};

// Three-way mapping, contradiction checked first: contradict >=
// contradict_min -> 0.0; else entail >= entail_min -> 1.0; else 0.5.
double discretize(const EntailmentScores& scores,
                  const DiscretizeThresholds& thresholds = DiscretizeThresholds{});

// "The diagnosis is <label>."
std::string diagnosis_hypothesis(DiagnosisLabel label);

// Premise is the reasoning text, hypothesis the fixed template above.
double consistency_reward(EntailmentBackend& backend, const DiagnosticOutput& output,
                          const DiscretizeThresholds& thresholds = DiscretizeThresholds{});

}  // namespace advr
