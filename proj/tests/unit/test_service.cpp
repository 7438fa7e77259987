#include <cstdlib>
#include <set>
#include <thread>

#include "doctest.h"
#include "httplib.h"
#include "scorelens/error.hpp"
#include "scorelens/provenance/hashing.hpp"
#include "scorelens/service/attention_cache.hpp"
#include "scorelens/service/config.hpp"
#include "scorelens/service/job_queue.hpp"
#include "scorelens/service/router.hpp"
#include "scorelens/service/server.hpp"
#include "scorelens/service/workbench.hpp"
#include "support/fixtures.hpp"

using namespace scorelens;
using namespace scorelens::service;
using nlohmann::json;

namespace {

std::unique_ptr<Workbench> bundled_workbench(const std::filesystem::path& event_log = {}) {
  auto c = ServiceConfig::defaults();
  c.models = support::data("models.json");
  c.event_log = event_log;
  return Workbench::from_config(c);
}

HttpResponse call(const Router& r, std::string method, std::string path, json body = nullptr,
                  std::map<std::string, std::string> query = {}) {
  return r.handle({std::move(method), std::move(path), std::move(query), body.is_null() ? "" : body.dump()});
}

json fixture_assignment_body() {
  const auto p = support::fixture_pairs()[0];
  return {{"source", p.source},
          {"summaries", json::array({{{"text", p.summary}, {"slot_id", "slot-a"}},
                                     {{"text", support::fixture_pairs()[1].summary}, {"slot_id", "slot-b"}}})}};
}

class ScopedEnv {
 public:
  ScopedEnv(const char* name, const std::string& value) : name_(name) {
    if (const char* old = std::getenv(name)) old_ = old;
    ::setenv(name, value.c_str(), 1);
  }
  ~ScopedEnv() {
    if (old_)
      ::setenv(name_, old_->c_str(), 1);
    else
      ::unsetenv(name_);
  }

 private:
  const char* name_;
  std::optional<std::string> old_;
};

}  // namespace

TEST_SUITE("config") {
  TEST_CASE("defaults are valid") {
    const auto c = ServiceConfig::defaults();
    CHECK_NOTHROW(c.validate());
    CHECK(c.model_configs().size() == 2);
    CHECK(c.event_log.empty());
  }

  TEST_CASE("bundled config resolves relative paths") {
    const auto c = ServiceConfig::load(support::data("config.json"));
    CHECK(c.lexicon == support::data("lexicon.tsv"));
    CHECK(c.models == support::data("models.json"));
    CHECK_NOTHROW(c.validate());
  }

  TEST_CASE("schema errors name the key") {
    try {
      (void)ServiceConfig::from_json(json{{"port", "eighty"}}, "");
      FAIL("expected schema error");
    } catch (const SchemaError& e) {
      CHECK(e.field() == "port");
    }
    CHECK_THROWS_AS(ServiceConfig::from_json(json{{"workers", -1}}, ""), SchemaError);
  }

  TEST_CASE("validation") {
    auto c = ServiceConfig::defaults();
    c.port = 0;  // ephemeral
    CHECK_NOTHROW(c.validate());
    c.port = 65536;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    c.port = -1;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    c = ServiceConfig::defaults();
    c.lexicon = "/nonexistent/lexicon.tsv";
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    c = ServiceConfig::defaults();
    c.workers = 0;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
  }

  TEST_CASE("flag beats environment") {
    ScopedEnv env("SCORELENS_CONFIG", "/from/env.json");
    CHECK(resolve_config_path(std::string("/from/flag.json")) == std::filesystem::path("/from/flag.json"));
    CHECK(resolve_config_path(std::nullopt) == std::filesystem::path("/from/env.json"));
  }

  TEST_CASE("no flag, no environment") {
    ScopedEnv env("SCORELENS_CONFIG", "");
    CHECK(!resolve_config_path(std::nullopt));
  }
}

TEST_SUITE("jobs") {
  TEST_CASE("jobs run and report results") {
    JobQueue q(2, [](std::exception_ptr e) { return describe_error(e).body; });
    const auto ok = q.submit([] { return json{{"x", 1}}; });
    const auto bad = q.submit([]() -> json { throw NotFound("gone"); });
    CHECK(ok.starts_with("job-"));
    CHECK(ok.size() == 20);
    const auto a = q.wait(ok);
    REQUIRE(a);
    CHECK(a->status == JobStatus::done);
    CHECK(a->result == json{{"x", 1}});
    const auto b = q.wait(bad);
    REQUIRE(b);
    CHECK(b->status == JobStatus::failed);
    CHECK(b->error["error"] == "gone");
    CHECK(!q.get("job-unknown"));
    CHECK(to_json(*a)["status"] == "done");
  }

  TEST_CASE("many jobs all finish") {
    JobQueue q(3, [](std::exception_ptr e) { return describe_error(e).body; });
    std::vector<std::string> ids;
    for (int i = 0; i < 50; ++i) ids.push_back(q.submit([i] { return json(i * i); }));
    for (int i = 0; i < 50; ++i) CHECK(q.wait(ids[static_cast<std::size_t>(i)])->result == json(i * i));
  }
}

TEST_SUITE("cache") {
  TEST_CASE("lru eviction") {
    AttentionCache cache(2);
    int computed = 0;
    auto make = [&](double s) {
      return [&computed, s] {
        ++computed;
        auto r = std::make_shared<scoring::ScoreResult>();
        r->score = s;
        return AttentionCache::Value(r);
      };
    };
    CHECK(cache.get_or_compute("a", make(1))->score == 1);
    CHECK(cache.get_or_compute("b", make(2))->score == 2);
    CHECK(cache.get_or_compute("a", make(9))->score == 1);  // hit, a becomes recent
    CHECK(cache.get_or_compute("c", make(3))->score == 3);  // evicts b
    CHECK(cache.size() == 2);
    CHECK(cache.find("b") == nullptr);
    CHECK(cache.find("a") != nullptr);
    CHECK(computed == 3);
    CHECK(cache.hits() == 1);
    CHECK(cache.misses() == 3);
    CHECK(AttentionCache::key("m", "h") == "m|h");
  }

  TEST_CASE("a failed computation is not cached") {
    AttentionCache cache(2);
    CHECK_THROWS_AS(cache.get_or_compute("k", []() -> AttentionCache::Value { throw EngineError("x"); }), EngineError);
    CHECK(cache.size() == 0);
  }

  TEST_CASE("concurrent readers") {
    AttentionCache cache(4);
    std::atomic<int> computed{0};
    std::vector<std::jthread> threads;
    for (int t = 0; t < 8; ++t)
      threads.emplace_back([&] {
        for (int i = 0; i < 200; ++i) {
          const auto v = cache.get_or_compute("k" + std::to_string(i % 3), [&] {
            ++computed;
            return std::make_shared<const scoring::ScoreResult>();
          });
          CHECK(v != nullptr);
        }
      });
    threads.clear();
    CHECK(cache.size() == 3);
  }
}

TEST_SUITE("router") {
  TEST_CASE("models are listed without secrets") {
    auto wb = bundled_workbench();
    const Router r(*wb);
    const auto res = call(r, "GET", "/api/models");
    CHECK(res.status == 200);
    REQUIRE(res.body.is_array());
    CHECK(res.body.size() == wb->scorer().models().size());
    for (const auto& m : res.body) {
      CHECK(!m.contains("seed"));
      CHECK(!m.contains("endpoint"));
    }
  }

  TEST_CASE("empty summaries") {
    auto wb = bundled_workbench();
    const Router r(*wb);
    const auto res = call(r, "POST", "/api/score", {{"source", "s"}, {"summaries", json::array()}});
    CHECK(res.status == 400);
    CHECK(res.body["error"] == "summaries must be non-empty");
    CHECK(call(r, "POST", "/api/assignments", {{"source", "s"}, {"summaries", json::array()}}).status == 400);
  }

  TEST_CASE("unknown routes, methods and ids") {
    auto wb = bundled_workbench();
    const Router r(*wb);
    CHECK(call(r, "GET", "/api/nothing").status == 404);
    CHECK(call(r, "GET", "/").status == 404);
    CHECK(call(r, "GET", "/api/score").status == 405);
    CHECK(call(r, "GET", "/api/jobs/job-0000").status == 404);
    CHECK(call(r, "POST", "/api/score", {{"assignment_id", "asg-missing"}}).status == 404);
    CHECK(call(r, "POST", "/api/training/nope/load").status == 404);
  }

  TEST_CASE("body schema errors name the field") {
    auto wb = bundled_workbench();
    const Router r(*wb);
    auto res = r.handle({"POST", "/api/assignments", {}, "{not json"});
    CHECK(res.status == 400);
    CHECK(res.body["detail"]["field"] == "body");
    res = call(r, "POST", "/api/assignments", {{"summaries", {"x"}}});
    CHECK(res.status == 400);
    CHECK(res.body["detail"]["field"] == "source");
    res = call(r, "POST", "/api/assignments", {{"source", "s"}, {"summaries", {{{"text", "t"}, {"options", {{"words", 3}}}}}}});
    CHECK(res.status == 400);
    CHECK(res.body["detail"]["field"] == "summaries[0].options.words");
  }

  TEST_CASE("score equals direct engine calls and is recorded") {
    auto wb = bundled_workbench();
    const Router r(*wb);
    const auto created = call(r, "POST", "/api/assignments", fixture_assignment_body());
    REQUIRE(created.status == 200);
    const std::string id = created.body["id"];
    CHECK(id.starts_with("asg-"));
    const auto res = call(r, "POST", "/api/score", {{"assignment_id", id}, {"model_ids", {"content", "wording"}}});
    REQUIRE(res.status == 200);
    CHECK(res.body["run_number"] == 1);
    CHECK(res.body["entries"].size() == 4);
    const auto p0 = support::fixture_pairs()[0], p1 = support::fixture_pairs()[1];
    for (const auto& e : res.body["entries"]) {
      const std::string summary = e["slot_id"] == "slot-a" ? p0.summary : p1.summary;
      CHECK(e["score"].get<double>() == wb->scorer().score_pair(e["model_id"].get<std::string>(), p0.source, summary, false).score);
      CHECK(e["summary_hash"] == provenance::text_hash(summary));
    }
    const auto again = call(r, "POST", "/api/score", {{"assignment_id", id}});
    CHECK(again.body["run_number"] == 2);
    CHECK(again.body["entries"].size() == 2 * wb->scorer().models().size());
  }

  TEST_CASE("inline score request and history") {
    auto wb = bundled_workbench();
    const Router r(*wb);
    auto body = fixture_assignment_body();
    body["model_ids"] = {"content"};
    const auto res = call(r, "POST", "/api/score", body);
    REQUIRE(res.status == 200);
    const std::string id = res.body["assignment_id"];
    body["assignment_id"] = id;
    body["summaries"][0]["text"] = "A revised summary about plants.";
    call(r, "POST", "/api/score", body);
    const auto h = call(r, "GET", "/api/history", nullptr, {{"slot", "slot-a"}});
    REQUIRE(h.status == 200);
    REQUIRE(h.body["rows"].size() == 2);
    CHECK(h.body["rows"][0]["summary_text"] == support::fixture_pairs()[0].summary);
    CHECK(h.body["rows"][1]["summary_text"] == "A revised summary about plants.");
    CHECK(h.body["rows"][1]["run_number"] == 2);
    CHECK(call(r, "GET", "/api/history").status == 400);
    CHECK(call(r, "GET", "/api/history", nullptr, {{"slot", "unknown"}}).body["rows"].empty());
  }

  TEST_CASE("perturbation job equals the engine report") {
    auto wb = bundled_workbench();
    const Router r(*wb);
    const std::string id = call(r, "POST", "/api/assignments", fixture_assignment_body()).body["id"];
    const auto sub = call(r, "POST", "/api/perturb",
                          {{"assignment_id", id}, {"slot_id", "slot-a"}, {"model_id", "content"}, {"method", "tokens"}});
    REQUIRE(sub.status == 202);
    const std::string job = sub.body["job_id"];
    wb->wait_job(job);
    const auto res = call(r, "GET", "/api/jobs/" + job);
    REQUIRE(res.status == 200);
    REQUIRE(res.body["status"] == "done");
    const auto p = support::fixture_pairs()[0];
    CHECK(res.body["result"] == perturb::to_json(wb->perturbation().run(p.source, p.summary, "content", perturb::Method::tokens)));
    CHECK(call(r, "POST", "/api/perturb",
               {{"assignment_id", id}, {"slot_id", "slot-a"}, {"model_id", "content"}, {"method", "lime"}})
              .status == 400);
  }

  TEST_CASE("opted-in slots queue perturbations when scored") {
    auto wb = bundled_workbench();
    const Router r(*wb);
    auto body = fixture_assignment_body();
    body["summaries"][0]["options"] = {{"sentences", true}, {"grammar", true}};
    body["model_ids"] = {"content"};
    const auto res = call(r, "POST", "/api/score", body);
    REQUIRE(res.status == 200);
    REQUIRE(res.body["jobs"].size() == 2);
    for (const auto& j : res.body["jobs"]) {
      CHECK(j["slot_id"] == "slot-a");
      const auto done = wb->wait_job(j["job_id"]);
      CHECK(done->status == JobStatus::done);
      CHECK(done->result["method"] == j["method"]);
    }
  }

  TEST_CASE("attention slices equal the direct slice") {
    auto wb = bundled_workbench();
    const Router r(*wb);
    const std::string id = call(r, "POST", "/api/assignments", fixture_assignment_body()).body["id"];
    const auto p = support::fixture_pairs()[0];
    const auto direct = wb->scorer().score_pair("content", p.source, p.summary, true);
    for (const auto& [mode, slice] :
         std::vector<std::pair<std::string, attention::SliceMode>>{{"rug", attention::SliceMode::rug(1, 2)},
                                                                   {"by_layer", attention::SliceMode::by_layer(2)},
                                                                   {"by_head", attention::SliceMode::by_head(1)}}) {
      const auto res = call(r, "GET", "/api/attention/" + id + "/slot-a/content", nullptr,
                            {{"token", "5"}, {"layer", "1"}, {"head", "2"}, {"mode", mode}});
      REQUIRE(res.status == 200);
      CHECK(res.body == slice_payload(direct, 5, slice));
    }
    CHECK(wb->attention_cache().size() == 1);
    CHECK(call(r, "GET", "/api/attention/" + id + "/slot-a/content").status == 400);
    CHECK(call(r, "GET", "/api/attention/" + id + "/slot-a/content", nullptr, {{"token", "100000"}}).status == 400);
    CHECK(call(r, "GET", "/api/attention/" + id + "/slot-z/content", nullptr, {{"token", "0"}}).status == 404);
  }

  TEST_CASE("scatter and example loading") {
    auto wb = bundled_workbench();
    const Router r(*wb);
    const auto first = wb->corpus().examples().front();
    const auto loaded = call(r, "POST", "/api/training/" + first.example_id + "/load");
    REQUIRE(loaded.status == 200);
    CHECK(loaded.body["source"] == first.source);
    CHECK(loaded.body["slots"][0]["text"] == first.summary);
    CHECK(loaded.body["slots"][0]["cached_scores"].empty());
    const std::string id = loaded.body["id"];
    const auto scored = call(r, "POST", "/api/score", {{"assignment_id", id}, {"model_ids", {"content", "wording"}}});
    REQUIRE(scored.status == 200);
    const auto again = call(r, "POST", "/api/training/" + first.example_id + "/load");
    CHECK(again.body["slots"][0]["cached_scores"]["content"] == scored.body["entries"][0]["score"]);

    const auto s = call(r, "GET", "/api/training/scatter", nullptr, {{"x", "content"}, {"y", "wording"}});
    REQUIRE(s.status == 200);
    CHECK(s.body == provenance::to_json(provenance::scatter_payload(wb->corpus(), wb->log(), "content", "content",
                                                                     "wording", "wording")));
    CHECK(s.body["training_points"].size() == wb->corpus().size());
    CHECK(s.body["current_points"].size() == 1);
    CHECK(call(r, "GET", "/api/training/scatter", nullptr, {{"x", "content"}, {"y", "nope"}}).status == 404);
  }

  TEST_CASE("wire endpoint serves the scorer protocol") {
    auto wb = bundled_workbench();
    const Router r(*wb);
    const auto p = support::fixture_pairs()[2];
    const auto res = call(r, "POST", "/score",
                          {{"model_id", "content"}, {"source", p.source}, {"summary", p.summary}, {"want_attention", true}});
    REQUIRE(res.status == 200);
    CHECK(res.body == scoring::score_response_to_json(wb->scorer().score_pair("content", p.source, p.summary, true)));
  }

  TEST_CASE("history survives a restart") {
    support::TempDir dir;
    json before;
    {
      auto wb = bundled_workbench(dir / "events.jsonl");
      const Router r(*wb);
      call(r, "POST", "/api/score", fixture_assignment_body());
      call(r, "POST", "/api/score", fixture_assignment_body());
      before = call(r, "GET", "/api/history", nullptr, {{"slot", "slot-b"}}).body;
    }
    auto wb = bundled_workbench(dir / "events.jsonl");
    const Router r(*wb);
    CHECK(call(r, "GET", "/api/history", nullptr, {{"slot", "slot-b"}}).body == before);
    CHECK(before["rows"].size() == 2 * wb->scorer().models().size());
  }

  TEST_CASE("concurrent identical score requests agree") {
    auto wb = bundled_workbench();
    const Router r(*wb);
    const std::string id = call(r, "POST", "/api/assignments", fixture_assignment_body()).body["id"];
    std::vector<json> results(6);
    {
      std::vector<std::jthread> threads;
      for (std::size_t t = 0; t < results.size(); ++t)
        threads.emplace_back([&, t] { results[t] = call(r, "POST", "/api/score", {{"assignment_id", id}}).body; });
    }
    std::set<std::uint64_t> runs;
    for (const auto& res : results) {
      runs.insert(res["run_number"].get<std::uint64_t>());
      for (std::size_t i = 0; i < res["entries"].size(); ++i)
        CHECK(res["entries"][i]["score"] == results[0]["entries"][i]["score"]);
    }
    CHECK(runs.size() == results.size());
  }

  TEST_CASE("query parsing") {
    const auto q = parse_query("a=1&b=x%20y&c=&d+e=f+g");
    CHECK(q.at("a") == "1");
    CHECK(q.at("b") == "x y");
    CHECK(q.at("c").empty());
    CHECK(q.at("d e") == "f g");
  }

  TEST_CASE("error mapping") {
    CHECK(describe_error(std::make_exception_ptr(ExternalError("http://x", "down"))).status == 502);
    CHECK(describe_error(std::make_exception_ptr(ExternalError("http://x", "down"))).body["detail"]["endpoint"] ==
          "http://x");
    CHECK(describe_error(std::make_exception_ptr(EngineError("disk"))).status == 500);
    const auto pe = describe_error(std::make_exception_ptr(
        perturb::PerturbationError(3, std::make_exception_ptr(InvalidArgument("too long")), "too long")));
    CHECK(pe.status == 400);
    CHECK(pe.body["detail"]["variant_index"] == 3);
  }
}

TEST_SUITE("server") {
  TEST_CASE("http round trip") {
    auto wb = bundled_workbench();
    const Router router(*wb);
    HttpServer server(router, 4);
    const int port = server.start("127.0.0.1", 0);
    CHECK(port > 0);
    httplib::Client client("127.0.0.1", port);
    auto res = client.Get("/api/models");
    REQUIRE(res);
    CHECK(res->status == 200);
    CHECK(json::parse(res->body) == router.handle({"GET", "/api/models", {}, ""}).body);
    res = client.Get("/api/history?slot=slot%2Da");
    REQUIRE(res);
    CHECK(json::parse(res->body)["slot_id"] == "slot-a");
    res = client.Post("/api/score", R"({"source":"s","summaries":[]})", "application/json");
    REQUIRE(res);
    CHECK(res->status == 400);
    CHECK(res->get_header_value("Content-Type").starts_with("application/json"));
    res = client.Get("/missing");
    REQUIRE(res);
    CHECK(res->status == 404);
    server.stop();
  }

  TEST_CASE("external scorer pointed at the service") {
    auto wb = bundled_workbench();
    const Router router(*wb);
    HttpServer server(router, 4);
    const int port = server.start("127.0.0.1", 0);
    const auto p = support::fixture_pairs()[3];
    const auto r = scoring::external_score("http://127.0.0.1:" + std::to_string(port),
                                           {"wording", p.source, p.summary, true});
    const auto direct = wb->scorer().score_pair("wording", p.source, p.summary, true);
    CHECK(r.score == direct.score);
    CHECK(*r.attention == *direct.attention);
    server.stop();
  }
}
