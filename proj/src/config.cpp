#include "advr/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "advr/errors.hpp"

namespace advr {

namespace {

void check(bool ok, const char* field, const std::string& message) {
  if (!ok) throw ConfigError(field, message);
}

}  // namespace

void RunConfig::validate() const {
  check(!guideline.empty(), "guideline", "must name a builtin dictionary or a file");
  check(epsilon > 0.0, "epsilon", "must be positive");
  check(beta >= 0.0, "beta", "must be nonnegative");
  check(lambda_res >= 0.0, "lambda_res", "must be nonnegative");
  check(temperature > 0.0, "temperature", "must be positive");
  check(queue_capacity >= 1, "queue_capacity", "must be at least 1");
  check(m_c >= 0.0 && m_c <= 1.0, "m_c", "must lie in [0,1]");
  check(max_rethinks >= 0, "max_rethinks", "must be nonnegative");
  check(review_fraction >= 0.0 && review_fraction <= 1.0, "review_fraction",
        "must lie in [0,1]");
  check(thinker_timeout_ms > 0, "thinker_timeout_ms", "must be positive");
  check(nli_timeout_ms > 0, "nli_timeout_ms", "must be positive");
  check(concurrency_bound >= 1, "concurrency_bound", "must be at least 1");
  check(contradict_min > 0.0 && contradict_min <= 1.0, "contradict_min",
        "must lie in (0,1]");
  check(entail_min > 0.0 && entail_min <= 1.0, "entail_min", "must lie in (0,1]");
}

RunConfig config_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config", std::string("not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config", "top level must be an object");

  if (!doc.contains("schema_version"))
    throw ConfigError("schema_version", "missing");
  if (!doc["schema_version"].is_number_integer() || doc["schema_version"].get<int>() != 1)
    throw ConfigError("schema_version", "expected 1");

  static const std::set<std::string> known = {
      "schema_version", "guideline",        "norms_path",
      "ranges_path",    "epsilon",          "beta",
      "lambda_res",     "temperature",      "queue_capacity",
      "m_c",            "max_rethinks",     "review_fraction",
      "seed",           "thinker_url",      "nli_url",
      "thinker_timeout_ms", "nli_timeout_ms", "concurrency_bound",
      "contradict_min", "entail_min"};
  for (const auto& [key, value] : doc.items()) {
    if (!known.count(key)) throw ConfigError(key, "unknown config key");
    (void)value;
  }

  RunConfig config;
  auto read_string = [&](const char* key, std::string& out) {
    if (!doc.contains(key)) return;
    if (!doc[key].is_string()) throw ConfigError(key, "expected a string");
    out = doc[key].get<std::string>();
  };
  auto read_double = [&](const char* key, double& out) {
    if (!doc.contains(key)) return;
    if (!doc[key].is_number()) throw ConfigError(key, "expected a number");
    out = doc[key].get<double>();
  };
  auto read_int = [&](const char* key, int& out) {
    if (!doc.contains(key)) return;
    if (!doc[key].is_number_integer()) throw ConfigError(key, "expected an integer");
    out = doc[key].get<int>();
  };

  read_string("guideline", config.guideline);
  read_string("norms_path", config.norms_path);
  read_string("ranges_path", config.ranges_path);
  read_double("epsilon", config.epsilon);
  read_double("beta", config.beta);
  read_double("lambda_res", config.lambda_res);
  read_double("temperature", config.temperature);
  read_int("queue_capacity", config.queue_capacity);
  read_double("m_c", config.m_c);
  read_int("max_rethinks", config.max_rethinks);
  read_double("review_fraction", config.review_fraction);
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned() && !doc["seed"].is_number_integer())
      throw ConfigError("seed", "expected a nonnegative integer");
    auto v = doc["seed"].get<std::int64_t>();
    if (v < 0) throw ConfigError("seed", "expected a nonnegative integer");
    config.seed = static_cast<std::uint64_t>(v);
  }
  read_string("thinker_url", config.thinker_url);
  read_string("nli_url", config.nli_url);
  read_int("thinker_timeout_ms", config.thinker_timeout_ms);
  read_int("nli_timeout_ms", config.nli_timeout_ms);
  read_int("concurrency_bound", config.concurrency_bound);
  read_double("contradict_min", config.contradict_min);
  read_double("entail_min", config.entail_min);

  config.validate();
  return config;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config", "cannot read file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return config_from_json(buffer.str());
}

void apply_env_endpoints(RunConfig& config) {
  if (config.thinker_url.empty()) {
    if (const char* v = std::getenv("THINKER_URL")) config.thinker_url = v;
  }
  if (config.nli_url.empty()) {
    if (const char* v = std::getenv("NLI_URL")) config.nli_url = v;
  }
}

}  // namespace advr
