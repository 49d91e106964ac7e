// advr: command-line front end over the library. One subcommand per pipeline
// stage; every stage runs offline unless a backend URL is configured.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "advr/builtin_data.hpp"
#include "advr/config.hpp"
#include "advr/consistency.hpp"
#include "advr/domain.hpp"
#include "advr/errors.hpp"
#include "advr/fusion.hpp"
#include "advr/fusion_io.hpp"
#include "advr/grpo.hpp"
#include "advr/guideline.hpp"
#include "advr/metrics.hpp"
#include "advr/output_schema.hpp"
#include "advr/refine.hpp"
#include "advr/report.hpp"
#include "advr/rng.hpp"

namespace {

using advr::BackendError;
using advr::ConfigError;
using advr::RunConfig;
using nlohmann::json;

std::string read_file(const std::string& path, const char* field) {
  if (path == "-") {
    std::ostringstream buffer;
    buffer << std::cin.rdbuf();
    return buffer.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(field, "cannot read file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// path "-" selects stdout.
void write_text(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("out", "cannot write file: " + path);
  out << text;
}

advr::NormTable load_norms(const RunConfig& config) {
  if (config.norms_path.empty()) return advr::builtin_norm_table();
  try {
    return advr::NormTable::from_json(json::parse(read_file(config.norms_path, "norms")));
  } catch (const json::exception& e) {
    throw ConfigError("norms", std::string("not valid JSON: ") + e.what());
  }
}

advr::ReferenceRanges load_ranges(const RunConfig& config) {
  if (config.ranges_path.empty()) return advr::builtin_reference_ranges();
  try {
    return advr::ranges_from_json(json::parse(read_file(config.ranges_path, "reference_ranges")));
  } catch (const json::exception& e) {
    throw ConfigError("reference_ranges", std::string("not valid JSON: ") + e.what());
  }
}

std::unique_ptr<advr::EntailmentBackend> make_entailment_backend(const RunConfig& config) {
  if (!config.nli_url.empty()) {
    return std::make_unique<advr::RemoteEntailmentBackend>(config.nli_url, config.nli_timeout_ms,
                                                           config.concurrency_bound);
  }
  return std::make_unique<advr::LexicalFallbackBackend>();
}

advr::DiagnosisLabel parse_gold(const std::string& token) {
  auto label = advr::parse_diagnosis_label(token);
  if (!label) throw std::invalid_argument("unknown diagnosis label: " + token);
  return *label;
}

// "<subject_id>:<visit_id>" within a loaded cohort.
advr::SubjectVisit find_visit(const std::vector<advr::SubjectVisit>& cohort,
                              const std::string& spec) {
  auto colon = spec.find(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == spec.size())
    throw std::invalid_argument("visit selector must be subject_id:visit_id, got: " + spec);
  std::string subject = spec.substr(0, colon);
  std::string visit = spec.substr(colon + 1);
  for (const auto& v : cohort) {
    if (v.subject_id == subject && v.visit_id == visit) return v;
  }
  throw std::invalid_argument("visit not found in cohort: " + spec);
}

struct VisitContext {
  std::vector<advr::SubjectVisit> cohort;
  const advr::SubjectVisit* visit = nullptr;  // into cohort
};

VisitContext load_visit_context(const std::string& cohort_path, const std::string& visit_spec) {
  VisitContext ctx;
  if (visit_spec.empty()) {
    if (!cohort_path.empty())
      throw std::invalid_argument("--cohort without --visit selects nothing; add --visit");
    return ctx;
  }
  if (cohort_path.empty()) throw std::invalid_argument("--visit requires --cohort");
  ctx.cohort = advr::cohort_from_jsonl(read_file(cohort_path, "cohort"));
  const advr::SubjectVisit target = find_visit(ctx.cohort, visit_spec);
  for (const auto& v : ctx.cohort) {
    if (v.subject_id == target.subject_id && v.visit_id == target.visit_id) {
      ctx.visit = &v;
      break;
    }
  }
  return ctx;
}

// ---------------------------------------------------------------------------
// gen-synthetic
// ---------------------------------------------------------------------------

int run_gen_synthetic(const RunConfig& config, int subjects, int visits_min, int visits_max,
                      const std::string& out_path) {
  auto cohort = advr::generate_synthetic_cohort(config.seed, subjects, visits_min, visits_max);
  write_text(out_path, advr::cohort_to_jsonl(cohort));
  if (out_path != "-") {
    json summary = {{"subjects", subjects},
                    {"visits", cohort.size()},
                    {"seed", config.seed},
                    {"out", out_path}};
    std::cout << summary.dump() << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// synthesize
// ---------------------------------------------------------------------------

int run_synthesize(const RunConfig& config, const std::string& cohort_path,
                   const std::string& subject, const std::string& visit, bool as_json,
                   const std::string& out_path) {
  auto cohort = advr::cohort_from_jsonl(read_file(cohort_path, "cohort"));
  advr::NormTable norms = load_norms(config);
  advr::ReferenceRanges ranges = load_ranges(config);

  std::ostringstream out;
  int rendered = 0;
  for (const auto& v : cohort) {
    if (!subject.empty() && v.subject_id != subject) continue;
    if (!visit.empty() && v.visit_id != visit) continue;
    advr::ClinicalReport report = advr::synthesize_visit_report(v, norms, ranges);
    if (as_json) {
      out << advr::report_to_json(report).dump() << "\n";
    } else {
      if (rendered > 0) out << "\n";
      out << report.render();
    }
    ++rendered;
  }
  if (rendered == 0) throw std::invalid_argument("no visit matched the subject/visit filter");
  write_text(out_path, out.str());
  return 0;
}

// ---------------------------------------------------------------------------
// score
// ---------------------------------------------------------------------------

int run_score(const RunConfig& config, const std::string& input_path, const std::string& gold_token,
              const std::string& cohort_path, const std::string& visit_spec, bool format_only) {
  std::string text = read_file(input_path, "input");

  if (format_only) {
    advr::ParseOutcome outcome = advr::parse_output(text);
    json doc;
    doc["format_ok"] = outcome.ok();
    doc["r_format"] = advr::format_reward(text);
    json violations = json::array();
    for (auto v : outcome.violations) violations.push_back(advr::to_string(v));
    doc["violations"] = violations;
    std::cout << doc.dump(2) << "\n";
    return 0;
  }

  advr::DiagnosisLabel gold = parse_gold(gold_token);
  VisitContext ctx = load_visit_context(cohort_path, visit_spec);
  advr::ReferenceRanges ranges = load_ranges(config);
  advr::GuidelineDictionary dict = advr::resolve_guideline(config.guideline);
  auto backend = make_entailment_backend(config);
  advr::DiscretizeThresholds thresholds{config.contradict_min, config.entail_min};

  advr::RewardBreakdown breakdown =
      advr::composite_reward(text, gold, ctx.visit, ranges, dict, *backend, thresholds);
  std::cout << advr::breakdown_to_json(breakdown).dump(2) << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// score-group
// ---------------------------------------------------------------------------

struct Candidate {
  std::string text;
  std::vector<double> policy_logprobs;
  std::vector<double> ref_logprobs;
  bool has_logprobs = false;
};

std::vector<Candidate> parse_candidates(const std::string& body) {
  std::vector<Candidate> candidates;
  std::istringstream lines(body);
  std::string line;
  int line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    if (line.empty()) continue;
    json doc;
    try {
      doc = json::parse(line);
    } catch (const json::exception& e) {
      throw std::invalid_argument("candidate line " + std::to_string(line_no) +
                                  " is not valid JSON: " + e.what());
    }
    Candidate candidate;
    if (doc.is_string()) {
      candidate.text = doc.get<std::string>();
    } else if (doc.is_object() && doc.contains("text") && doc["text"].is_string()) {
      candidate.text = doc["text"].get<std::string>();
      if (doc.contains("policy_logprobs") != doc.contains("ref_logprobs"))
        throw std::invalid_argument("candidate line " + std::to_string(line_no) +
                                    " must carry both logprob arrays or neither");
      if (doc.contains("policy_logprobs")) {
        candidate.policy_logprobs = doc["policy_logprobs"].get<std::vector<double>>();
        candidate.ref_logprobs = doc["ref_logprobs"].get<std::vector<double>>();
        candidate.has_logprobs = true;
      }
    } else {
      throw std::invalid_argument("candidate line " + std::to_string(line_no) +
                                  " must be a JSON string or an object with a text field");
    }
    candidates.push_back(std::move(candidate));
  }
  if (candidates.empty()) throw std::invalid_argument("candidate file is empty");
  return candidates;
}

int run_score_group(const RunConfig& config, const std::string& input_path,
                    const std::string& gold_token, const std::string& cohort_path,
                    const std::string& visit_spec) {
  advr::DiagnosisLabel gold = parse_gold(gold_token);
  std::vector<Candidate> candidates = parse_candidates(read_file(input_path, "input"));
  VisitContext ctx = load_visit_context(cohort_path, visit_spec);
  advr::ReferenceRanges ranges = load_ranges(config);
  advr::GuidelineDictionary dict = advr::resolve_guideline(config.guideline);
  auto backend = make_entailment_backend(config);
  advr::DiscretizeThresholds thresholds{config.contradict_min, config.entail_min};

  std::vector<double> rewards;
  json breakdowns = json::array();
  for (const auto& candidate : candidates) {
    advr::RewardBreakdown b =
        advr::composite_reward(candidate.text, gold, ctx.visit, ranges, dict, *backend, thresholds);
    rewards.push_back(b.composite);
    breakdowns.push_back(advr::breakdown_to_json(b));
  }

  advr::AdvantageVector advantages = advr::normalize_group(rewards, config.epsilon);

  json doc;
  doc["rewards"] = rewards;
  doc["advantages"] = advantages.values;
  doc["mu_r"] = advantages.mu_r;
  doc["sigma_r"] = advantages.sigma_r;
  doc["candidates"] = breakdowns;

  bool all_logprobs = true;
  for (const auto& candidate : candidates) all_logprobs = all_logprobs && candidate.has_logprobs;
  if (all_logprobs) {
    std::vector<double> kls;
    for (const auto& candidate : candidates)
      kls.push_back(advr::sequence_kl(candidate.policy_logprobs, candidate.ref_logprobs));
    doc["kl"] = kls;
    doc["beta"] = config.beta;
    doc["objective"] = advr::rlvr_objective(rewards, kls, config.beta);
  }
  std::cout << doc.dump(2) << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// build-dataset
// ---------------------------------------------------------------------------

std::vector<std::string> parse_script(const std::string& body) {
  std::vector<std::string> responses;
  std::istringstream lines(body);
  std::string line;
  int line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    if (line.empty()) continue;
    json doc;
    try {
      doc = json::parse(line);
    } catch (const json::exception& e) {
      throw std::invalid_argument("script line " + std::to_string(line_no) +
                                  " is not valid JSON: " + e.what());
    }
    if (doc.is_string()) {
      responses.push_back(doc.get<std::string>());
    } else if (doc.is_object() && doc.contains("text") && doc["text"].is_string()) {
      responses.push_back(doc["text"].get<std::string>());
    } else {
      throw std::invalid_argument("script line " + std::to_string(line_no) +
                                  " must be a JSON string or an object with a text field");
    }
  }
  if (responses.empty()) throw std::invalid_argument("script file is empty");
  return responses;
}

int run_build_dataset(const RunConfig& config, const std::string& cohort_path, int subjects,
                      const std::string& script_path, const std::string& out_path) {
  std::vector<advr::SubjectVisit> cohort;
  if (!cohort_path.empty()) {
    cohort = advr::cohort_from_jsonl(read_file(cohort_path, "cohort"));
  } else {
    cohort = advr::generate_synthetic_cohort(config.seed, subjects);
  }

  std::unique_ptr<advr::ThinkerBackend> thinker;
  if (!script_path.empty() && !config.thinker_url.empty())
    throw ConfigError("thinker", "--script and a thinker URL are mutually exclusive");
  if (!script_path.empty()) {
    thinker = std::make_unique<advr::ScriptedThinker>(parse_script(read_file(script_path, "script")));
  } else if (!config.thinker_url.empty()) {
    thinker = std::make_unique<advr::RemoteThinker>(config.thinker_url, config.thinker_timeout_ms,
                                                    config.concurrency_bound);
  } else {
    throw ConfigError("thinker", "supply --script or a thinker URL (flag, config, or THINKER_URL)");
  }

  advr::NormTable norms = load_norms(config);
  advr::ReferenceRanges ranges = load_ranges(config);
  advr::GuidelineDictionary dict = advr::resolve_guideline(config.guideline);

  advr::DatasetConfig dataset_config;
  dataset_config.max_rethinks = config.max_rethinks;
  dataset_config.review_fraction = config.review_fraction;
  dataset_config.seed = config.seed;

  advr::DatasetSummary summary =
      advr::build_dataset(cohort, norms, ranges, dict, *thinker, dataset_config, out_path);

  json doc = {{"first_try", summary.first_try},
              {"rethink_1", summary.rethink_1},
              {"rethink_2", summary.rethink_2},
              {"rethink_more", summary.rethink_more},
              {"forced", summary.forced},
              {"failed", summary.failed},
              {"review_flagged", summary.review_flagged},
              {"emitted", summary.emitted()},
              {"out", out_path}};
  std::cout << doc.dump() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// kernel-check
// ---------------------------------------------------------------------------

int run_kernel_check(const RunConfig& config, int trials) {
  using Mat = advr::fusion::Matrix<double>;
  using Vec = advr::fusion::Vector<double>;
  namespace fusion = advr::fusion;

  advr::Rng rng(config.seed);
  auto random_matrix = [&rng](Eigen::Index rows, Eigen::Index cols) {
    Mat m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.normal(0.0, 1.0);
    return m;
  };

  int failures = 0;
  auto check = [&failures](const char* name, bool ok) {
    std::cout << (ok ? "ok " : "FAIL ") << name << "\n";
    if (!ok) ++failures;
  };

  {
    bool ok = true;
    for (int t = 0; t < trials; ++t) {
      Mat p = fusion::row_softmax(random_matrix(1 + t % 5, 1 + (t * 7) % 6));
      for (Eigen::Index i = 0; i < p.rows(); ++i) {
        ok = ok && std::abs(p.row(i).sum() - 1.0) <= 1e-12 && p.row(i).minCoeff() >= 0.0;
      }
    }
    check("softmax rows are distributions", ok);
  }

  {
    bool ok = true;
    for (int t = 0; t < trials; ++t) {
      Mat q = random_matrix(3, 4), k = random_matrix(1, 4), v = random_matrix(1, 5);
      Mat out = fusion::scaled_dot_attention(q, k, v).output;
      for (Eigen::Index i = 0; i < out.rows(); ++i)
        ok = ok && (out.row(i) - v.row(0)).cwiseAbs().maxCoeff() == 0.0;
    }
    check("single-key attention returns the value row", ok);
  }

  {
    bool ok = true;
    for (int t = 0; t < trials; ++t) {
      Mat q = Mat::Zero(2, 4), k = random_matrix(6, 4), v = random_matrix(6, 3);
      Mat out = fusion::scaled_dot_attention(q, k, v).output;
      Mat mean = v.colwise().mean();
      for (Eigen::Index i = 0; i < out.rows(); ++i)
        ok = ok && (out.row(i) - mean.row(0)).cwiseAbs().maxCoeff() <= 1e-12;
    }
    check("zero queries average the values uniformly", ok);
  }

  {
    bool ok = true;
    for (int t = 0; t < trials; ++t) {
      Mat q = random_matrix(4, 3), k = random_matrix(5, 3), v = random_matrix(5, 2);
      fusion::AttentionResult<double> got = fusion::scaled_dot_attention(q, k, v);
      // Direct per-row recomputation.
      for (Eigen::Index i = 0; i < q.rows(); ++i) {
        Vec logits(k.rows());
        for (Eigen::Index j = 0; j < k.rows(); ++j)
          logits(j) = q.row(i).dot(k.row(j)) / std::sqrt(3.0);
        double max = logits.maxCoeff();
        Vec w = (logits.array() - max).exp();
        w /= w.sum();
        Eigen::RowVectorXd expected = Eigen::RowVectorXd::Zero(v.cols());
        for (Eigen::Index j = 0; j < k.rows(); ++j) expected += w(j) * v.row(j);
        ok = ok && (got.output.row(i) - expected).cwiseAbs().maxCoeff() <= 1e-12;
      }
    }
    check("attention matches per-row recomputation", ok);
  }

  {
    bool ok = true;
    for (int t = 0; t < trials; ++t) {
      Mat v_feats = random_matrix(3, 4), t_feats = random_matrix(5, 4);
      auto cross = fusion::bidirectional_cross_attention(v_feats, t_feats);
      auto fused = fusion::fuse_residual(v_feats, t_feats, cross.a_v_to_t, cross.a_t_to_v);
      ok = ok && fused.t_v.rows() == 3 && fused.t_t.rows() == 5;
      ok = ok && (fused.t_t - (t_feats + cross.a_v_to_t)).cwiseAbs().maxCoeff() == 0.0;
      ok = ok && (fused.t_v - (v_feats + cross.a_t_to_v)).cwiseAbs().maxCoeff() == 0.0;
    }
    check("residual fusion adds attended streams", ok);
  }

  {
    bool ok = true;
    for (int t = 0; t < trials; ++t) {
      Mat img = random_matrix(6, 8);
      Mat txt = img + 0.01 * random_matrix(6, 8);  // nearly aligned pairs
      std::vector<int> perm{1, 2, 3, 4, 5, 0};
      Mat shuffled(6, 8);
      for (int i = 0; i < 6; ++i) shuffled.row(i) = txt.row(perm[static_cast<size_t>(i)]);
      ok = ok && fusion::itc_loss(img, txt, 0.07) < fusion::itc_loss(img, shuffled, 0.07);
    }
    check("contrastive loss prefers aligned pairs", ok);
  }

  {
    Mat eye = Mat::Identity(4, 4);
    double sharp = fusion::itc_loss(eye, eye, 0.01);
    check("one-hot features at sharp temperature score near zero", sharp < 1e-3);
  }

  {
    Vec online(3), momentum(3);
    online << 1.0, 2.0, 3.0;
    momentum << -1.0, 0.0, 5.0;
    fusion::MomentumState<double> frozen{online, momentum, 1.0, fusion::FeatureQueue<double>(4, 3)};
    fusion::MomentumState<double> copied{online, momentum, 0.0, fusion::FeatureQueue<double>(4, 3)};
    auto after_frozen = fusion::momentum_update(frozen);
    auto after_copied = fusion::momentum_update(copied);
    bool ok = (after_frozen.momentum_params - momentum).cwiseAbs().maxCoeff() == 0.0 &&
              (after_copied.momentum_params - online).cwiseAbs().maxCoeff() == 0.0;
    check("momentum extremes freeze and copy", ok);
  }

  {
    fusion::FeatureQueue<double> queue(3, 2);
    for (int i = 0; i < 5; ++i) {
      Vec f(2);
      f << i, i;
      queue.push(f);
    }
    Mat snap = queue.snapshot();
    bool ok = snap.rows() == 3 && snap(0, 0) == 2.0 && snap(1, 0) == 3.0 && snap(2, 0) == 4.0;
    check("feature queue evicts oldest first", ok);
  }

  {
    Mat a = random_matrix(3, 3), b = random_matrix(3, 3);
    double mse = fusion::mse_loss(a, b);
    double direct = (a - b).squaredNorm() / 9.0;
    bool ok = std::abs(mse - direct) <= 1e-12;
    Vec lp(4);
    lp << -0.5, -1.0, -0.25, -2.0;
    ok = ok && std::abs(fusion::mean_token_nll(lp) - 0.9375) <= 1e-15;
    ok = ok && std::abs(fusion::sft_nll(lp) - 3.75) <= 1e-15;
    check("reconstruction losses match direct formulas", ok);
  }

  {
    double combined = fusion::pt_loss(0.25, 0.5, 0.125, 2.0);
    check("pretraining loss composes linearly", combined == 0.25 + 2.0 * (0.5 + 0.125));
  }

  {
    namespace fs = std::filesystem;
    fs::path path = fs::temp_directory_path() / "advr_kernel_check.featmat";
    Mat m = random_matrix(5, 7);
    fusion::save_feature_matrix(path.string(), m);
    Mat back = fusion::load_feature_matrix(path.string());
    fs::remove(path);
    check("feature matrix file round-trips exactly",
          back.rows() == 5 && back.cols() == 7 && (back - m).cwiseAbs().maxCoeff() == 0.0);
  }

  if (failures == 0) {
    std::cout << "all checks passed\n";
    return 0;
  }
  std::cerr << "error: " << failures << " kernel check(s) failed\n";
  return 1;
}

// ---------------------------------------------------------------------------
// evaluate
// ---------------------------------------------------------------------------

int run_evaluate(const std::string& input_path, const std::string& task_token) {
  auto task = advr::parse_binary_task(task_token);
  if (!task) throw std::invalid_argument("unknown task: " + task_token + " (expected CN_vs_CI or CN_vs_MCI)");

  std::vector<advr::PredictionRecord> records;
  std::vector<std::pair<std::string, std::string>> texts;  // (candidate, reference)
  bool all_have_texts = true;

  std::istringstream lines(read_file(input_path, "input"));
  std::string line;
  int line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    if (line.empty()) continue;
    json doc;
    try {
      doc = json::parse(line);
    } catch (const json::exception& e) {
      throw std::invalid_argument("record line " + std::to_string(line_no) +
                                  " is not valid JSON: " + e.what());
    }
    auto field = [&](const char* key) -> std::string {
      if (!doc.contains(key) || !doc[key].is_string())
        throw std::invalid_argument("record line " + std::to_string(line_no) +
                                    " needs string field " + key);
      return doc[key].get<std::string>();
    };
    advr::PredictionRecord record;
    auto predicted = advr::parse_diagnosis_label(field("predicted"));
    auto gold = advr::parse_diagnosis_label(field("gold"));
    auto confidence = advr::parse_confidence(field("confidence"));
    if (!predicted || !gold || !confidence)
      throw std::invalid_argument("record line " + std::to_string(line_no) +
                                  " carries an unknown label or confidence");
    record.predicted = *predicted;
    record.gold = *gold;
    record.confidence = *confidence;
    records.push_back(record);
    if (doc.contains("reasoning") && doc.contains("reference")) {
      texts.emplace_back(doc["reasoning"].get<std::string>(), doc["reference"].get<std::string>());
    } else {
      all_have_texts = false;
    }
  }
  if (records.empty()) throw std::invalid_argument("no records in " + input_path);

  advr::ConfusionMetrics confusion = advr::confusion_metrics(records, *task);
  double area = advr::auc(records, *task, advr::ScoreMap{});

  json doc;
  doc["task"] = advr::to_string(*task);
  doc["records"] = records.size();
  doc["dropped"] = confusion.dropped;
  doc["accuracy"] = confusion.accuracy;
  if (confusion.sensitivity) doc["sensitivity"] = *confusion.sensitivity;
  if (confusion.specificity) doc["specificity"] = *confusion.specificity;
  doc["tp"] = confusion.tp;
  doc["fn"] = confusion.fn;
  doc["tn"] = confusion.tn;
  doc["fp"] = confusion.fp;
  doc["auc"] = area;
  if (all_have_texts && !texts.empty()) {
    double bleu_sum = 0.0, rouge_sum = 0.0;
    for (const auto& [candidate, reference] : texts) {
      bleu_sum += advr::bleu(candidate, reference);
      rouge_sum += advr::rouge_l(candidate, reference);
    }
    doc["mean_bleu"] = bleu_sum / static_cast<double>(texts.size());
    doc["mean_rouge_l"] = rouge_sum / static_cast<double>(texts.size());
  }
  std::cout << doc.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Guideline-anchored diagnostic scoring and data tooling"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  app.add_option("--config", config_path, "JSON config file (schema_version 1)");

  // Flag overrides; applied over file/env values only when given.
  std::string flag_guideline, flag_norms, flag_ranges, flag_thinker_url, flag_nli_url;
  double flag_epsilon = 0, flag_beta = 0, flag_lambda_res = 0, flag_temperature = 0, flag_m_c = 0;
  double flag_review_fraction = 0, flag_contradict_min = 0, flag_entail_min = 0;
  int flag_queue_capacity = 0, flag_max_rethinks = 0, flag_concurrency = 0;
  int flag_thinker_timeout = 0, flag_nli_timeout = 0;
  std::uint64_t flag_seed = 0;
  auto* opt_guideline =
      app.add_option("--guideline", flag_guideline, "Dictionary name (niaaa, iwg2) or JSON path");
  auto* opt_norms = app.add_option("--norms", flag_norms, "Normative table JSON path");
  auto* opt_ranges = app.add_option("--ranges", flag_ranges, "Reference ranges JSON path");
  auto* opt_seed = app.add_option("--seed", flag_seed, "Seed for stochastic subcommands");
  auto* opt_epsilon = app.add_option("--epsilon", flag_epsilon, "Advantage denominator guard");
  auto* opt_beta = app.add_option("--beta", flag_beta, "KL penalty weight");
  auto* opt_lambda_res =
      app.add_option("--lambda-res", flag_lambda_res, "Reconstruction loss weight");
  auto* opt_temperature =
      app.add_option("--temperature", flag_temperature, "Contrastive temperature");
  auto* opt_queue_capacity =
      app.add_option("--queue-capacity", flag_queue_capacity, "Feature queue capacity");
  auto* opt_m_c = app.add_option("--m-c", flag_m_c, "Momentum coefficient in [0,1]");
  auto* opt_max_rethinks =
      app.add_option("--max-rethinks", flag_max_rethinks, "Rethink rounds before forcing");
  auto* opt_review_fraction =
      app.add_option("--review-fraction", flag_review_fraction, "Expert-review sampling rate");
  auto* opt_thinker_url = app.add_option("--thinker-url", flag_thinker_url, "Thinker endpoint");
  auto* opt_nli_url = app.add_option("--nli-url", flag_nli_url, "Entailment endpoint");
  auto* opt_thinker_timeout =
      app.add_option("--thinker-timeout-ms", flag_thinker_timeout, "Thinker timeout");
  auto* opt_nli_timeout = app.add_option("--nli-timeout-ms", flag_nli_timeout, "NLI timeout");
  auto* opt_concurrency =
      app.add_option("--concurrency", flag_concurrency, "Max in-flight backend requests");
  auto* opt_contradict_min =
      app.add_option("--contradict-min", flag_contradict_min, "Contradiction cutoff");
  auto* opt_entail_min = app.add_option("--entail-min", flag_entail_min, "Entailment cutoff");

  // gen-synthetic
  auto* gen = app.add_subcommand("gen-synthetic", "Generate a deterministic synthetic cohort");
  int gen_subjects = 30, gen_visits_min = 1, gen_visits_max = 1;
  std::string gen_out = "-";
  gen->add_option("--subjects", gen_subjects, "Number of subjects")->check(CLI::PositiveNumber);
  gen->add_option("--visits-min", gen_visits_min, "Minimum visits per subject");
  gen->add_option("--visits-max", gen_visits_max, "Maximum visits per subject");
  gen->add_option("--out", gen_out, "Output JSONL path (- for stdout)");

  // synthesize
  auto* synth = app.add_subcommand("synthesize", "Render clinical reports from a cohort file");
  std::string synth_cohort, synth_subject, synth_visit, synth_out = "-";
  bool synth_json = false;
  synth->add_option("--cohort", synth_cohort, "Cohort JSONL path")->required();
  synth->add_option("--subject", synth_subject, "Only this subject id");
  synth->add_option("--visit", synth_visit, "Only this visit id");
  synth->add_flag("--json", synth_json, "Emit one JSON report per line instead of text");
  synth->add_option("--out", synth_out, "Output path (- for stdout)");

  // score
  auto* score = app.add_subcommand("score", "Score one candidate response");
  std::string score_input, score_gold, score_cohort, score_visit;
  bool score_format_only = false;
  score->add_option("--input", score_input, "Response text file (- for stdin)")->required();
  std::string score_gold_help = "Gold diagnosis (CN, MCI, Dementia)";
  auto* score_gold_opt = score->add_option("--gold", score_gold, score_gold_help);
  score->add_option("--cohort", score_cohort, "Cohort JSONL for visit context");
  score->add_option("--visit", score_visit, "Visit selector subject_id:visit_id");
  score->add_flag("--format-only", score_format_only, "Report template compliance only");
  score->callback([&] {
    if (!score_format_only && score_gold_opt->count() == 0)
      throw CLI::RequiredError("--gold (unless --format-only)");
  });

  // score-group
  auto* group = app.add_subcommand("score-group", "Score a candidate group and normalize rewards");
  std::string group_input, group_gold, group_cohort, group_visit;
  group->add_option("--input", group_input, "Candidates JSONL (- for stdin)")->required();
  group->add_option("--gold", group_gold, "Gold diagnosis (CN, MCI, Dementia)")->required();
  group->add_option("--cohort", group_cohort, "Cohort JSONL for visit context");
  group->add_option("--visit", group_visit, "Visit selector subject_id:visit_id");

  // build-dataset
  auto* build = app.add_subcommand("build-dataset", "Run the refinement loop over a cohort");
  std::string build_cohort, build_script, build_out;
  int build_subjects = 30;
  build->add_option("--cohort", build_cohort, "Cohort JSONL (omit to generate synthetically)");
  build->add_option("--subjects", build_subjects, "Synthetic cohort size when no --cohort");
  build->add_option("--script", build_script, "Scripted thinker responses JSONL");
  build->add_option("--out", build_out, "Dataset JSONL path")->required();

  // kernel-check
  auto* kernel = app.add_subcommand("kernel-check", "Verify the fusion math invariants");
  int kernel_trials = 25;
  kernel->add_option("--trials", kernel_trials, "Randomized trials per invariant")
      ->check(CLI::PositiveNumber);

  // evaluate
  auto* eval = app.add_subcommand("evaluate", "Confusion, ranking, and text-overlap metrics");
  std::string eval_input, eval_task = "CN_vs_CI";
  eval->add_option("--input", eval_input, "Prediction records JSONL (- for stdin)")->required();
  eval->add_option("--task", eval_task, "Binary task: CN_vs_CI or CN_vs_MCI");

  try {
    app.parse(argc, argv);

    RunConfig config;
    if (!config_path.empty()) config = advr::load_config_file(config_path);
    advr::apply_env_endpoints(config);
    if (opt_guideline->count()) config.guideline = flag_guideline;
    if (opt_norms->count()) config.norms_path = flag_norms;
    if (opt_ranges->count()) config.ranges_path = flag_ranges;
    if (opt_seed->count()) config.seed = flag_seed;
    if (opt_epsilon->count()) config.epsilon = flag_epsilon;
    if (opt_beta->count()) config.beta = flag_beta;
    if (opt_lambda_res->count()) config.lambda_res = flag_lambda_res;
    if (opt_temperature->count()) config.temperature = flag_temperature;
    if (opt_queue_capacity->count()) config.queue_capacity = flag_queue_capacity;
    if (opt_m_c->count()) config.m_c = flag_m_c;
    if (opt_max_rethinks->count()) config.max_rethinks = flag_max_rethinks;
    if (opt_review_fraction->count()) config.review_fraction = flag_review_fraction;
    if (opt_thinker_url->count()) config.thinker_url = flag_thinker_url;
    if (opt_nli_url->count()) config.nli_url = flag_nli_url;
    if (opt_thinker_timeout->count()) config.thinker_timeout_ms = flag_thinker_timeout;
    if (opt_nli_timeout->count()) config.nli_timeout_ms = flag_nli_timeout;
    if (opt_concurrency->count()) config.concurrency_bound = flag_concurrency;
    if (opt_contradict_min->count()) config.contradict_min = flag_contradict_min;
    if (opt_entail_min->count()) config.entail_min = flag_entail_min;
    config.validate();

    if (gen->parsed())
      return run_gen_synthetic(config, gen_subjects, gen_visits_min, gen_visits_max, gen_out);
    if (synth->parsed())
      return run_synthesize(config, synth_cohort, synth_subject, synth_visit, synth_json,
                            synth_out);
    if (score->parsed())
      return run_score(config, score_input, score_gold, score_cohort, score_visit,
                       score_format_only);
    if (group->parsed())
      return run_score_group(config, group_input, group_gold, group_cohort, group_visit);
    if (build->parsed())
      return run_build_dataset(config, build_cohort, build_subjects, build_script, build_out);
    if (kernel->parsed()) return run_kernel_check(config, kernel_trials);
    if (eval->parsed()) return run_evaluate(eval_input, eval_task);
    return 0;
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const BackendError& e) {
    std::cerr << "backend error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "argument error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
