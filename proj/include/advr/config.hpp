#pragma once

#include <cstdint>
#include <string>

namespace advr {

// Runtime knobs shared by the CLI subcommands. Field defaults are the
// documented defaults of the owning modules; validate() enforces the ranges
// so a bad config file fails before any work starts.
struct RunConfig {
  // Scoring dictionary: a builtin name ("niaaa", "iwg2") or a path to a
  // dictionary JSON file.
  std::string guideline = "niaaa";

  // Data tables. Empty string selects the builtin copy.
  std::string norms_path;
  std::string ranges_path;

  // Group normalization and objective.
  double epsilon = 1e-8;
  double beta = 0.04;

  // Fusion pretraining losses.
  double lambda_res = 1.0;
  double temperature = 0.07;
  int queue_capacity = 1024;
  double m_c = 0.995;

  // Self-refinement loop and dataset emission.
  int max_rethinks = 2;
  double review_fraction = 0.05;

  // Seed for every stochastic subcommand.
  std::uint64_t seed = 0;

  // Remote backends. Empty URL means offline (scripted / lexical fallback).
  std::string thinker_url;
  std::string nli_url;
  int thinker_timeout_ms = 30000;
  int nli_timeout_ms = 30000;
  int concurrency_bound = 4;

  // Entailment discretization cutoffs.
  double contradict_min = 0.5;
  double entail_min = 0.66;

  // Throws ConfigError naming the offending field.
  void validate() const;
};

// Parses a JSON config document (schema_version 1). Unknown keys are
// rejected so typos surface instead of silently keeping defaults. The result
// is validated. Throws ConfigError.
RunConfig config_from_json(const std::string& text);

// Reads and parses path. Throws ConfigError when unreadable.
RunConfig load_config_file(const std::string& path);

// Fills empty backend URLs from THINKER_URL / NLI_URL. Environment is the
// weakest layer: values already present (from file or flags) win.
void apply_env_endpoints(RunConfig& config);

}  // namespace advr
