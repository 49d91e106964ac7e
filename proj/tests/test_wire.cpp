#include <atomic>
#include <filesystem>
#include <string>
#include <thread>
#include <vector>

#include <doctest.h>
#include <httplib.h>
#include <nlohmann/json.hpp>

#include "advr/builtin_data.hpp"
#include "advr/consistency.hpp"
#include "advr/errors.hpp"
#include "advr/refine.hpp"

using namespace advr;
using nlohmann::json;

namespace {

// In-process HTTP fixture bound to an ephemeral loopback port.
struct TestServer {
  httplib::Server server;
  std::thread thread;
  int port = 0;

  void start() {
    port = server.bind_to_any_port("127.0.0.1");
    REQUIRE(port > 0);
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }

  std::string url(const std::string& path) const {
    return "http://127.0.0.1:" + std::to_string(port) + path;
  }

  ~TestServer() {
    server.stop();
    if (thread.joinable()) thread.join();
  }
};

}  // namespace

TEST_CASE("remote entailment round-trips probabilities and caches by text pair") {
  TestServer fixture;
  std::atomic<int> hits{0};
  fixture.server.Post("/nli", [&](const httplib::Request& req, httplib::Response& res) {
    ++hits;
    json body = json::parse(req.body);
    REQUIRE(body.contains("premise"));
    REQUIRE(body.contains("hypothesis"));
    res.set_content(json{{"entail", 0.7}, {"neutral", 0.2}, {"contradict", 0.1}}.dump(),
                    "application/json");
  });
  fixture.start();

  RemoteEntailmentBackend backend(fixture.url("/nli"), 5000, 2);
  auto scores = backend.entailment_probs("The tau level is elevated.", "The diagnosis is MCI.");
  CHECK(scores.entail == doctest::Approx(0.7));
  CHECK(scores.neutral == doctest::Approx(0.2));
  CHECK(scores.contradict == doctest::Approx(0.1));
  CHECK(hits == 1);

  // Identical pair is served from the cache.
  backend.entailment_probs("The tau level is elevated.", "The diagnosis is MCI.");
  CHECK(hits == 1);

  // Any change in either text is a distinct key.
  backend.entailment_probs("The tau level is elevated.", "The diagnosis is CN.");
  CHECK(hits == 2);

  backend.clear_cache();
  backend.entailment_probs("The tau level is elevated.", "The diagnosis is MCI.");
  CHECK(hits == 3);

  CHECK_THROWS_AS(backend.entailment_probs("", "h"), std::invalid_argument);
}

TEST_CASE("remote entailment rejects sick replies as backend failures") {
  TestServer fixture;
  fixture.server.Post("/garbage", [](const httplib::Request&, httplib::Response& res) {
    res.set_content("not json at all", "text/plain");
  });
  fixture.server.Post("/missing", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(json{{"entail", 0.5}}.dump(), "application/json");
  });
  fixture.server.Post("/unnormalized", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(json{{"entail", 0.9}, {"neutral", 0.9}, {"contradict", 0.9}}.dump(),
                    "application/json");
  });
  fixture.server.Post("/boom", [](const httplib::Request&, httplib::Response& res) {
    res.status = 500;
    res.set_content("{}", "application/json");
  });
  fixture.start();

  auto probe = [&](const std::string& path) {
    RemoteEntailmentBackend backend(fixture.url(path), 5000, 1);
    backend.entailment_probs("premise text", "hypothesis text");
  };
  CHECK_THROWS_AS(probe("/garbage"), BackendError);
  CHECK_THROWS_AS(probe("/missing"), BackendError);
  CHECK_THROWS_AS(probe("/unnormalized"), BackendError);
  CHECK_THROWS_WITH_AS(probe("/boom"), "entailment request failed: http status 500",
                       BackendError);
}

TEST_CASE("an unreachable entailment endpoint raises a backend failure") {
  RemoteEntailmentBackend backend("http://127.0.0.1:9/nli", 500, 1);
  CHECK_THROWS_AS(backend.entailment_probs("premise", "hypothesis"), BackendError);
}

TEST_CASE("a bounded request slot releases after each call") {
  TestServer fixture;
  fixture.server.Post("/nli", [](const httplib::Request& req, httplib::Response& res) {
    json body = json::parse(req.body);
    std::string premise = body.at("premise");
    res.set_content(json{{"entail", premise == "entail me" ? 0.9 : 0.1},
                         {"neutral", premise == "entail me" ? 0.05 : 0.8},
                         {"contradict", premise == "entail me" ? 0.05 : 0.1}}
                        .dump(),
                    "application/json");
  });
  fixture.start();

  RemoteEntailmentBackend backend(fixture.url("/nli"), 5000, 1);
  for (int i = 0; i < 3; ++i) {
    auto scores = backend.entailment_probs("distinct premise " + std::to_string(i), "h");
    CHECK(scores.neutral == doctest::Approx(0.8));
  }

  // Discretization downstream of the wire replies.
  DiagnosticOutput output;
  output.reasoning = "entail me";
  output.diagnosis = DiagnosisLabel::MCI;
  output.confidence = Confidence::High;
  CHECK(consistency_reward(backend, output) == 1.0);
}

TEST_CASE("remote completion posts the prompt and returns the text field") {
  TestServer fixture;
  std::atomic<int> seen_max_tokens{0};
  fixture.server.Post("/think", [&](const httplib::Request& req, httplib::Response& res) {
    json body = json::parse(req.body);
    seen_max_tokens = body.at("max_tokens").get<int>();
    std::string prompt = body.at("prompt");
    res.set_content(json{{"text", "echo:" + prompt.substr(0, 5)}}.dump(), "application/json");
  });
  fixture.start();

  RemoteThinker thinker(fixture.url("/think"), 5000, 2);
  CHECK(thinker.complete("hello world", 256) == "echo:hello");
  CHECK(seen_max_tokens == 256);
}

TEST_CASE("remote completion failures surface as backend errors") {
  TestServer fixture;
  fixture.server.Post("/notext", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(json{{"output", "wrong key"}}.dump(), "application/json");
  });
  fixture.server.Post("/badjson", [](const httplib::Request&, httplib::Response& res) {
    res.set_content("<html>oops</html>", "text/html");
  });
  fixture.start();

  RemoteThinker no_text(fixture.url("/notext"), 5000, 1);
  CHECK_THROWS_WITH_AS(no_text.complete("p", 10), "thinker reply malformed: missing field text",
                       BackendError);
  RemoteThinker bad_json(fixture.url("/badjson"), 5000, 1);
  CHECK_THROWS_AS(bad_json.complete("p", 10), BackendError);

  RemoteThinker unreachable("http://127.0.0.1:9/think", 500, 1);
  CHECK_THROWS_AS(unreachable.complete("p", 10), BackendError);

  CHECK_THROWS_AS(RemoteThinker(fixture.url("/think"), 0, 1), ConfigError);
  CHECK_THROWS_AS(RemoteThinker(fixture.url("/think"), 1000, 0), ConfigError);
}

TEST_CASE("dataset construction runs end-to-end over the wire") {
  TestServer fixture;
  fixture.server.Post("/think", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(
        json{{"text",
              "Reasoning: Findings reviewed in full.\nDiagnosis: CN\nConfidence: High"}}
            .dump(),
        "application/json");
  });
  fixture.start();

  SubjectVisit visit;
  visit.subject_id = "S9001";
  visit.visit_id = "v01";
  visit.age = 68.0;
  visit.sex = Sex::M;
  visit.biomarkers["Abeta"] = 1200.0;
  visit.cognitive_scores["MMSE"] = 29.0;
  visit.gold_label = DiagnosisLabel::CN;
  visit.validate();

  RemoteThinker thinker(fixture.url("/think"), 5000, 2);
  DatasetConfig config;
  config.seed = 5;
  std::string out =
      (std::filesystem::temp_directory_path() / "advr_wire_dataset.jsonl").string();
  auto summary = build_dataset({visit}, builtin_norm_table(), builtin_reference_ranges(),
                               resolve_guideline("niaaa"), thinker, config, out);
  CHECK(summary.first_try == 1);
  CHECK(summary.failed == 0);
  std::filesystem::remove(out);
}
