// Acceptance checks: one PASS/FAIL line per criterion, each with its own
// tolerance and wall-clock budget. Exit status is non-zero if any fails.

#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

// Eigen before httplib: <resolv.h> defines a _res macro that breaks Eigen.
#include "oracles/pca_oracle.hpp"
#include "httplib.h"
#include "oracles/forward_oracle.hpp"
#include "oracles/spelling_oracle.hpp"
#include "scorelens/attention/attention_tensor.hpp"
#include "scorelens/perturb/grammar.hpp"
#include "scorelens/perturb/perturbation.hpp"
#include "scorelens/provenance/components.hpp"
#include "scorelens/provenance/run_log.hpp"
#include "scorelens/provenance/scatter.hpp"
#include "scorelens/scoring/attention_mask.hpp"
#include "scorelens/scoring/reference_model.hpp"
#include "scorelens/scoring/scorer.hpp"
#include "scorelens/service/router.hpp"
#include "scorelens/service/workbench.hpp"
#include "scorelens/text/tokenizer.hpp"
#include "support/fixtures.hpp"
#include "support/process.hpp"

namespace {

using namespace scorelens;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

// Tolerances.
constexpr double kRowSumTolerance = 1e-5;
constexpr double kForwardTolerance = 1e-6;
constexpr double kPcaTolerance = 1e-8;
constexpr double kMomentTolerance = 1e-9;
constexpr double kCorrelationTolerance = 1e-6;

struct Outcome {
  bool ok = true;
  std::string detail;
};

/// Collects the first few failures of a criterion.
class Checker {
 public:
  void expect(bool condition, const std::string& what) {
    if (condition) return;
    ++failures_;
    if (failures_ <= 3) messages_ += (messages_.empty() ? "" : "; ") + what;
  }
  Outcome outcome(std::string summary) const {
    if (failures_ == 0) return {true, std::move(summary)};
    return {false, std::to_string(failures_) + " failure(s): " + messages_};
  }

 private:
  std::size_t failures_ = 0;
  std::string messages_;
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

// 1 ------------------------------------------------------------------------
Outcome storage_arithmetic() {
  using attention::StorageMode;
  Checker c;
  const auto windowed = attention::storage_cells(700, 256, 12, 12, StorageMode::windowed);
  const auto full = attention::storage_cells(700, 256, 12, 12, StorageMode::full_global);
  c.expect(windowed == 25'804'800u, "windowed = " + std::to_string(windowed));
  c.expect(full == 70'560'000u, "full_global = " + std::to_string(full));
  return c.outcome("windowed 25804800, full_global 70560000");
}

// 2 ------------------------------------------------------------------------
std::string random_words(std::mt19937_64& rng, std::size_t count) {
  static const std::vector<std::string> vocab = {"plants", "use",  "light", "to",    "make", "food", "bees",
                                                 "carry",  "pollen", "the", "water", "rain", "rivers", "and",
                                                 "press",  "books", "ideas", "spread", "quickly", "."};
  std::string s;
  for (std::size_t i = 0; i < count; ++i) {
    if (i) s += ' ';
    s += vocab[rng() % vocab.size()];
  }
  return s;
}

Outcome attention_normalization() {
  Checker c;
  std::mt19937_64 rng(2024);
  std::size_t rows = 0, max_n = 0;
  for (int run = 0; run < 100; ++run) {
    auto config = scoring::ModelConfig::test_scale("norm", 1000 + static_cast<std::uint64_t>(run));
    config.layers = 4;
    config.heads = 4;
    config.window = 8;
    if (run % 2) config.global_mode = scoring::GlobalMode::summary_global;
    const auto summary = random_words(rng, 1 + rng() % 30);
    std::string source = random_words(rng, rng() % 120);
    auto input = scoring::build_model_input(source, summary, config, text::kReferenceTokenizerId);
    // Words may split into several pieces; drop source words until n <= 128.
    while (input.size() > 128) {
      const auto cut = source.rfind(' ');
      source.resize(cut == std::string::npos ? 0 : cut);
      input = scoring::build_model_input(source, summary, config, text::kReferenceTokenizerId);
    }
    max_n = std::max(max_n, input.size());
    const auto [score, tensor] = scoring::reference_forward(input, config);
    const auto mask = scoring::build_attention_mask(input, config);
    for (std::size_t l = 0; l < 4; ++l)
      for (std::size_t h = 0; h < 4; ++h)
        for (std::size_t q = 0; q < input.size(); ++q) {
          ++rows;
          const double sum = tensor.row_sum(l, h, q);
          c.expect(std::abs(sum - 1.0) <= kRowSumTolerance,
                   "run " + std::to_string(run) + " row sum " + fmt(sum));
          for (std::size_t k = 0; k < input.size(); ++k) {
            if (tensor.cell(l, h, q, k).present() && !mask.permits(q, k)) {
              c.expect(false, "weight outside mask at run " + std::to_string(run));
            }
          }
        }
  }
  return c.outcome(std::to_string(rows) + " rows over 100 runs, n <= " + std::to_string(max_n));
}

// 3 ------------------------------------------------------------------------
Outcome forward_oracle() {
  Checker c;
  double worst = 0.0;
  int fixtures = 0;
  const auto pairs = support::fixture_pairs();
  for (int variant = 0; variant < 4; ++variant) {
    auto config = support::tiny_config("oracle", 7);
    if (variant == 1) config.global_mode = scoring::GlobalMode::summary_global;
    if (variant == 2) config.seed = 8;
    if (variant == 3) config.window = 6;
    for (const auto& p : pairs) {
      const auto input = scoring::build_model_input(p.source, p.summary, config, text::kReferenceTokenizerId);
      const double engine = scoring::reference_forward(input, config).first;
      const double expect = oracle::forward(input, config).score;
      worst = std::max(worst, std::abs(engine - expect));
      c.expect(std::abs(engine - expect) <= kForwardTolerance,
               "fixture " + std::to_string(fixtures) + ": " + fmt(engine) + " vs " + fmt(expect));
      ++fixtures;
    }
  }
  c.expect(fixtures == 20, "expected 20 fixtures");
  std::ostringstream os;
  os << fixtures << " fixtures, max |diff| " << worst;
  return c.outcome(os.str());
}

// 4 ------------------------------------------------------------------------
/// Scores every text in a forked child with its own freshly built scorer and
/// returns the scores through a pipe.
std::vector<double> rescore_in_child(const scoring::ModelConfig& config, const std::string& source,
                                     const std::vector<std::string>& summaries) {
  int fds[2];
  if (::pipe(fds) != 0) throw std::runtime_error("pipe failed");
  const pid_t pid = ::fork();
  if (pid < 0) throw std::runtime_error("fork failed");
  if (pid == 0) {
    ::close(fds[0]);
    const scoring::Scorer fresh({config});
    for (const auto& s : summaries) {
      const double v = fresh.score_pair(config.model_id, source, s, false).score;
      if (::write(fds[1], &v, sizeof v) != sizeof v) ::_exit(3);
    }
    ::close(fds[1]);
    ::_exit(0);
  }
  ::close(fds[1]);
  std::vector<double> out(summaries.size());
  std::size_t got = 0;
  auto* bytes = reinterpret_cast<char*>(out.data());
  const std::size_t want = out.size() * sizeof(double);
  while (got < want) {
    const auto n = ::read(fds[0], bytes + got, want - got);
    if (n <= 0) break;
    got += static_cast<std::size_t>(n);
  }
  ::close(fds[0]);
  int status = 0;
  ::waitpid(pid, &status, 0);
  if (got != want || !WIFEXITED(status) || WEXITSTATUS(status) != 0) throw std::runtime_error("rescoring child failed");
  return out;
}

Outcome perturbation_oracle() {
  Checker c;
  const auto config = support::tiny_config("tiny", 7);
  const scoring::Scorer scorer({config});
  const auto resources = support::bundled_resources();
  const perturb::PerturbationEngine engine(scorer, resources, 4);
  std::size_t variants = 0;
  int pair_index = 0;
  for (const auto& p : support::fixture_pairs()) {
    for (auto method : {perturb::Method::words, perturb::Method::sentences, perturb::Method::tokens,
                        perturb::Method::grammar}) {
      const std::string where = "pair " + std::to_string(pair_index) + " " + std::string(perturb::to_string(method));
      const auto report = engine.run(p.source, p.summary, "tiny", method);
      std::vector<std::string> texts{p.summary};
      for (const auto& v : report.variants) texts.push_back(v.variant_text);
      const auto fresh = rescore_in_child(config, p.source, texts);
      c.expect(report.baseline_score == fresh[0], where + " baseline");
      for (std::size_t i = 0; i < report.variants.size(); ++i) {
        const auto& v = report.variants[i];
        c.expect(v.score == fresh[i + 1], where + " variant " + std::to_string(i) + " score");
        c.expect(v.delta == fresh[i + 1] - fresh[0], where + " variant " + std::to_string(i) + " delta");
      }
      variants += report.variants.size();
      switch (method) {
        case perturb::Method::tokens:
          c.expect(report.variants.size() == text::subword_tokenize(p.summary, "reference").size(), where + " count");
          break;
        case perturb::Method::sentences:
          c.expect(report.variants.size() == text::split_sentences(p.summary, *resources->abbreviations).size(),
                   where + " count");
          break;
        case perturb::Method::grammar: c.expect(report.variants.size() == 3, where + " count"); break;
        case perturb::Method::words: c.expect(!report.variants.empty(), where + " has no synonyms"); break;
      }
    }
    ++pair_index;
  }
  return c.outcome(std::to_string(variants) + " variants over 5 pairs x 4 methods, rescored in a separate process");
}

// 5 ------------------------------------------------------------------------
double mean(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()); }

double sample_std(const std::vector<double>& v) {
  const double m = mean(v);
  double s = 0.0;
  for (const double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

double correlation(const std::vector<double>& a, const std::vector<double>& b) {
  const double ma = mean(a), mb = mean(b);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

double distance_up_to_sign(const std::vector<double>& a, const std::vector<double>& b) {
  double plus = 0.0, minus = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    plus = std::max(plus, std::abs(a[i] - b[i]));
    minus = std::max(minus, std::abs(a[i] + b[i]));
  }
  return std::min(plus, minus);
}

Outcome pca_derivation() {
  Checker c;
  std::vector<provenance::Rubric> rows;
  for (const auto& r : support::read_json(support::fixture("rubric_8x6.json"))) rows.push_back(r.get<provenance::Rubric>());
  c.expect(rows.size() == 8, "fixture is not 8 x 6");
  const auto got = provenance::derive_component_scores(rows);
  const auto want = oracle::pca(rows);

  // Match each oracle component to one derived axis, up to sign.
  const double direct = std::max(distance_up_to_sign(got.content, want.z[0]), distance_up_to_sign(got.wording, want.z[1]));
  const double swapped = std::max(distance_up_to_sign(got.content, want.z[1]), distance_up_to_sign(got.wording, want.z[0]));
  const double err = std::min(direct, swapped);
  c.expect(err <= kPcaTolerance, "component mismatch " + fmt(err));

  for (const auto* axis : {&got.content, &got.wording}) {
    c.expect(std::abs(mean(*axis)) <= kMomentTolerance, "mean " + fmt(mean(*axis)));
    c.expect(std::abs(sample_std(*axis) - 1.0) <= kMomentTolerance, "std " + fmt(sample_std(*axis)));
  }
  const double r = correlation(got.content, got.wording);
  c.expect(std::abs(r) <= kCorrelationTolerance, "correlation " + fmt(r));
  std::ostringstream os;
  os << "max |diff| " << err << ", corr " << r;
  return c.outcome(os.str());
}

// 6 ------------------------------------------------------------------------
Outcome grammar_fixtures() {
  Checker c;
  const auto resources = support::bundled_resources();
  const auto& dict = *resources->dictionary;

  // Oracle expectations: unknown words take the brute-force closest term;
  // run-together chunks take the best exhaustive segmentation.
  std::string mode1_expect;
  for (const std::string w : {"teh", "cat", "iss", "here"}) {
    const auto best = dict.contains(w) ? std::optional<oracle::Best>({w, 0, dict.count(w)}) : oracle::closest(dict, w, 2);
    mode1_expect += (mode1_expect.empty() ? "" : " ") + (best ? best->term : w);
  }
  std::string mode3_expect;
  for (const std::string chunk : {"thecat", "sat"}) {
    for (const auto& w : oracle::segment(dict, chunk)) mode3_expect += (mode3_expect.empty() ? "" : " ") + w;
  }
  c.expect(mode1_expect == "the cat is here", "oracle mode 1 gives '" + mode1_expect + "'");
  c.expect(mode3_expect == "the cat sat", "oracle mode 3 gives '" + mode3_expect + "'");

  const auto mode1 = perturb::correct(perturb::GrammarMode::single_word, "teh cat iss here", *resources->spell_index);
  const auto mode3 = perturb::correct(perturb::GrammarMode::segmentation, "thecat sat", *resources->spell_index);
  c.expect(mode1 == "the cat is here", "mode 1 gives '" + mode1 + "'");
  c.expect(mode3 == "the cat sat", "mode 3 gives '" + mode3 + "'");
  return c.outcome("'" + mode1 + "', '" + mode3 + "'");
}

// 7 ------------------------------------------------------------------------
std::string summary_text(int call) {
  std::string s = "Summary " + std::to_string(call) + ": plants \"make\" food,\nthen rest.";
  if (call % 3 == 0) s += " Café – naïve 日本.";
  if (call % 7 == 0) s += "\t\\ tab and backslash";
  return s;
}

void record_calls(provenance::RunLog& log, int from, int to) {
  for (int call = from; call <= to; ++call) {
    provenance::Assignment a;
    a.id = "asg-recovery";
    a.source = "source";
    a.slots.push_back({"slot-" + std::to_string(call % 4), summary_text(call), {}, {}});
    log.record_run(a, {{a.slots[0].slot_id, "content", call * 0.01}});
  }
}

Outcome provenance_recovery() {
  Checker c;
  support::TempDir dir;
  const auto path = dir / "events.jsonl";

  // First process: calls 1..50, then dies mid-append without cleanup.
  const pid_t pid = ::fork();
  if (pid < 0) return {false, "fork failed"};
  if (pid == 0) {
    {
      provenance::RunLog log(path);
      record_calls(log, 1, 50);
    }
    FILE* f = std::fopen(path.c_str(), "a");
    std::fputs(R"({"run_number": 51, "timestamp": "2026-10-16T00:00:00.000Z", "entries": [{"slot_)", f);
    std::fflush(f);
    ::kill(::getpid(), SIGKILL);
    ::_exit(9);
  }
  int status = 0;
  ::waitpid(pid, &status, 0);
  c.expect(WIFSIGNALED(status), "first process did not crash");

  // Restarted process: calls 51..100.
  provenance::RunLog log(path);
  c.expect(log.last_run_number() == 50, "resumed after run " + std::to_string(log.last_run_number()));
  c.expect(log.discarded_lines() == 1, "torn tail not discarded");
  record_calls(log, 51, 100);

  const provenance::RunLog replayed(path);
  const auto records = replayed.records();
  c.expect(records.size() == 100, std::to_string(records.size()) + " records");
  for (std::size_t i = 0; i < records.size(); ++i) {
    c.expect(records[i].run_number == i + 1, "gap at " + std::to_string(i));
  }
  for (int slot = 0; slot < 4; ++slot) {
    const auto rows = replayed.get_history("slot-" + std::to_string(slot));
    std::vector<int> calls;
    for (int call = 1; call <= 100; ++call)
      if (call % 4 == slot) calls.push_back(call);
    c.expect(rows.size() == calls.size(), "history size for slot " + std::to_string(slot));
    for (std::size_t i = 0; i < std::min(rows.size(), calls.size()); ++i) {
      c.expect(rows[i].run_number == static_cast<std::uint64_t>(calls[i]), "history order");
      c.expect(rows[i].summary_text == summary_text(calls[i]), "text of run " + std::to_string(calls[i]));
    }
  }
  return c.outcome("runs 1..100 across a crash at call 50, histories byte-exact");
}

// 8 ------------------------------------------------------------------------
Outcome global_mode_contract() {
  Checker c;
  std::size_t checked = 0;
  for (const auto& p : support::fixture_pairs()) {
    auto global_cfg = scoring::ModelConfig::test_scale("g", 11);
    global_cfg.global_mode = scoring::GlobalMode::summary_global;
    const auto gin = scoring::build_model_input(p.source, p.summary, global_cfg, text::kReferenceTokenizerId);
    const auto gt = scoring::reference_forward(gin, global_cfg).second;
    for (std::size_t q = 0; q < gin.size(); ++q) {
      if (gin.segments[q] != scoring::Segment::summary) continue;
      for (std::size_t l = 0; l < gt.layers(); ++l)
        for (std::size_t h = 0; h < gt.heads(); ++h) {
          const auto rug = attention::slice_attention(gt, q, attention::SliceMode::rug(l, h));
          std::size_t missing = 0;
          for (const auto& cell : rug.cells) missing += cell.present() ? 0 : 1;
          c.expect(missing == 0, "summary token " + std::to_string(q) + " has missing keys");
          ++checked;
        }
    }

    const auto cls_cfg = scoring::ModelConfig::test_scale("c", 11);
    const auto cin = scoring::build_model_input(p.source, p.summary, cls_cfg, text::kReferenceTokenizerId);
    const auto ct = scoring::reference_forward(cin, cls_cfg).second;
    std::size_t sep = 0;
    while (cin.segments[sep] != scoring::Segment::separator) ++sep;
    const std::size_t q = sep / 2;  // middle of the source
    const std::size_t hw = cls_cfg.window / 2;
    std::set<std::size_t> expect{0};
    for (std::size_t k = q - std::min(q, hw); k <= std::min(cin.size() - 1, q + hw); ++k) expect.insert(k);
    for (std::size_t l = 0; l < ct.layers(); ++l)
      for (std::size_t h = 0; h < ct.heads(); ++h) {
        const auto rug = attention::slice_attention(ct, q, attention::SliceMode::rug(l, h));
        std::set<std::size_t> present;
        for (std::size_t k = 0; k < rug.rows; ++k)
          if (rug.at(k, 0).present()) present.insert(k);
        c.expect(present == expect, "source token " + std::to_string(q) + " keys differ from window + BEGIN");
        ++checked;
      }
  }
  return c.outcome(std::to_string(checked) + " rugs checked");
}

// 9 ------------------------------------------------------------------------
struct ServeProcess {
  pid_t pid = -1;
  int port = 0;
};

/// Starts `scorelens serve --port 0` and reads the bound port from its
/// "listening on host:port" line.
ServeProcess start_serve(const std::string& models_flag) {
  int fds[2];
  if (::pipe(fds) != 0) throw std::runtime_error("pipe failed");
  ServeProcess p;
  p.pid = ::fork();
  if (p.pid < 0) throw std::runtime_error("fork failed");
  if (p.pid == 0) {
    ::close(fds[0]);
    ::dup2(fds[1], STDERR_FILENO);
    ::execl(SCORELENS_CLI_PATH, SCORELENS_CLI_PATH, models_flag.c_str(), "serve", "--host", "127.0.0.1", "--port", "0",
            static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(fds[1]);
  std::string line;
  char ch = 0;
  while (::read(fds[0], &ch, 1) == 1 && ch != '\n') line += ch;
  ::close(fds[0]);
  const auto colon = line.rfind(':');
  if (line.find("listening on") == std::string::npos || colon == std::string::npos) {
    ::kill(p.pid, SIGKILL);
    ::waitpid(p.pid, nullptr, 0);
    throw std::runtime_error("serve did not start: " + line);
  }
  p.port = std::stoi(line.substr(colon + 1));
  return p;
}

Outcome api_cli_equivalence() {
  Checker c;
  auto config = service::ServiceConfig::defaults();
  config.models = support::data("models.json");
  auto wb = service::Workbench::from_config(config);
  const service::Router router(*wb);
  const auto& scorer = wb->scorer();
  auto call = [&](std::string method, std::string path, json body = nullptr, std::map<std::string, std::string> q = {}) {
    return router.handle({std::move(method), std::move(path), std::move(q), body.is_null() ? "" : body.dump()});
  };
  const auto pairs = support::fixture_pairs();
  const std::string models_flag = "--models=" + support::data("models.json").string();
  support::TempDir dir;
  std::size_t compared = 0;

  // GET /api/models
  json listed = json::array();
  for (const auto& m : scorer.models()) listed.push_back(scoring::to_json(m, true));
  c.expect(call("GET", "/api/models").body == listed, "/api/models");
  ++compared;

  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& p = pairs[i];
    const std::string tag = "pair " + std::to_string(i);
    const std::string slot = "slot-" + std::to_string(i);
    const auto src = dir / ("source" + std::to_string(i) + ".txt");
    const auto sum = dir / ("summary" + std::to_string(i) + ".txt");
    support::write(src, p.source);
    support::write(sum, p.summary);

    // POST /api/assignments
    const auto created = call("POST", "/api/assignments", {{"source", p.source}, {"summaries", {{{"text", p.summary}, {"slot_id", slot}}}}});
    const std::string id = created.body.value("id", "");
    provenance::Assignment expect_a{id, p.source, {{slot, p.summary, {}, {}}}};
    c.expect(created.status == 200 && created.body == provenance::to_json(expect_a), tag + " /api/assignments");

    // POST /api/score
    const auto scored = call("POST", "/api/score", {{"assignment_id", id}});
    c.expect(scored.status == 200, tag + " /api/score status");
    const auto& entries = scored.body["entries"];
    const auto models = scorer.models();
    c.expect(entries.size() == models.size(), tag + " /api/score entries");
    for (std::size_t m = 0; m < std::min(entries.size(), models.size()); ++m) {
      c.expect(entries[m]["model_id"] == models[m].model_id, tag + " model order");
      c.expect(entries[m]["score"].get<double>() == scorer.score_pair(models[m].model_id, p.source, p.summary, false).score,
               tag + " /api/score " + models[m].model_id);
    }

    // GET /api/history
    json rows = json::array();
    for (const auto& r : wb->log().get_history(slot)) rows.push_back(provenance::to_json(r));
    c.expect(call("GET", "/api/history", nullptr, {{"slot", slot}}).body == json{{"slot_id", slot}, {"rows", rows}},
             tag + " /api/history");

    // POST /api/perturb + GET /api/jobs/{id}, and the perturb subcommand
    const auto method = perturb::Method::tokens;
    const auto direct_report = perturb::to_json(perturb::PerturbationEngine(scorer, support::bundled_resources())
                                                    .run(p.source, p.summary, "content", method));
    const auto job = call("POST", "/api/perturb", {{"assignment_id", id}, {"slot_id", slot}, {"model_id", "content"}, {"method", "tokens"}});
    c.expect(job.status == 202, tag + " /api/perturb status");
    const std::string job_id = job.body.value("job_id", "");
    wb->wait_job(job_id);
    const auto polled = call("GET", "/api/jobs/" + job_id);
    c.expect(polled.body["status"] == "done" && polled.body["result"] == direct_report, tag + " /api/jobs");
    const auto cli_perturb = support::run_cli({"--json", models_flag, "perturb", "--source", src.string(), "--summary",
                                               sum.string(), "--model", "content", "--method", "tokens"});
    c.expect(cli_perturb.exit_code == 0 && json::parse(cli_perturb.out) == direct_report, tag + " cli perturb");

    // GET /api/attention and the attention subcommand
    const auto with_attention = scorer.score_pair("content-global", p.source, p.summary, true);
    const std::size_t token = with_attention.tokens.size() / 2;
    const auto slice = attention::SliceMode::by_layer(1);
    const auto direct_slice = service::slice_payload(with_attention, token, slice);
    c.expect(call("GET", "/api/attention/" + id + "/" + slot + "/content-global", nullptr,
                  {{"token", std::to_string(token)}, {"head", "1"}, {"mode", "by_layer"}})
                     .body == direct_slice,
             tag + " /api/attention");
    const auto cli_attention = support::run_cli({"--json", models_flag, "attention", "--source", src.string(), "--summary",
                                                 sum.string(), "--model", "content-global", "--token",
                                                 std::to_string(token), "--head", "1", "--mode", "by_layer"});
    c.expect(cli_attention.exit_code == 0 && json::parse(cli_attention.out) == direct_slice, tag + " cli attention");

    // POST /score and the score subcommand
    const auto direct_score = scoring::score_response_to_json(scorer.score_pair("wording", p.source, p.summary, false));
    c.expect(call("POST", "/score", {{"model_id", "wording"}, {"source", p.source}, {"summary", p.summary}, {"want_attention", false}})
                     .body == direct_score,
             tag + " /score");
    const auto cli_score = support::run_cli({"--json", models_flag, "score", "--source", src.string(), "--summary",
                                             sum.string(), "--model", "wording"});
    auto expect_cli_score = direct_score;
    expect_cli_score["model_id"] = "wording";
    c.expect(cli_score.exit_code == 0 && json::parse(cli_score.out) == expect_cli_score, tag + " cli score");
    compared += 9;
  }

  // GET /api/training/scatter
  c.expect(call("GET", "/api/training/scatter", nullptr, {{"x", "content"}, {"y", "wording"}}).body ==
               provenance::to_json(provenance::scatter_payload(wb->corpus(), wb->log(), "content", "content", "wording", "wording")),
           "/api/training/scatter");

  // POST /api/training/{id}/load
  const auto& example = wb->corpus().examples().front();
  c.expect(call("POST", "/api/training/" + example.example_id + "/load").body ==
               provenance::to_json(provenance::load_example(wb->corpus(), wb->log(), example.example_id)),
           "/api/training/load");

  // ingest-training and derive-scores
  provenance::TrainingCorpus corpus;
  const auto report = corpus.ingest(support::fixture("corpus_with_errors.jsonl"));
  json rejected = json::array();
  for (const auto& r : report.rejected) rejected.push_back({{"line", r.line}, {"reason", r.reason}});
  const auto cli_ingest = support::run_cli({"--json", "ingest-training", "--corpus", support::fixture("corpus_with_errors.jsonl").string()});
  c.expect(cli_ingest.exit_code == 0 && json::parse(cli_ingest.out) == json{{"accepted", report.accepted}, {"rejected", rejected}},
           "cli ingest-training");

  std::vector<provenance::Rubric> rubric;
  for (const auto& e : wb->corpus().examples()) rubric.push_back(*e.rubric);
  const auto derived = provenance::derive_component_scores(rubric);
  const auto cli_derive = support::run_cli({"--json", "derive-scores", "--corpus", support::data("training_corpus.jsonl").string()});
  bool derive_ok = cli_derive.exit_code == 0;
  if (derive_ok) {
    const auto j = json::parse(cli_derive.out);
    derive_ok = j["examples"].size() == rubric.size() && j["content_loading"] == json(derived.content_loading) &&
                j["wording_loading"] == json(derived.wording_loading);
    for (std::size_t i = 0; derive_ok && i < rubric.size(); ++i) {
      derive_ok = j["examples"][i]["content"].get<double>() == derived.content[i] &&
                  j["examples"][i]["wording"].get<double>() == derived.wording[i];
    }
  }
  c.expect(derive_ok, "cli derive-scores");
  compared += 4;

  // serve: the subcommand's HTTP payloads equal the in-process router's.
  const auto serve = start_serve(models_flag);
  httplib::Client client("127.0.0.1", serve.port);
  const auto res = client.Get("/api/models");
  c.expect(res && json::parse(res->body) == listed, "serve /api/models");
  const auto& p = pairs[0];
  const json score_body{{"model_id", "content"}, {"source", p.source}, {"summary", p.summary}, {"want_attention", true}};
  const auto served = client.Post("/score", score_body.dump(), "application/json");
  // Missing attention cells are NaN in memory and null on the wire.
  const auto direct = scoring::score_response_to_json(scorer.score_pair("content", p.source, p.summary, true));
  c.expect(served && json::parse(served->body) == json::parse(direct.dump()), "serve /score");
  ::kill(serve.pid, SIGTERM);
  int status = 0;
  ::waitpid(serve.pid, &status, 0);
  c.expect(WIFEXITED(status) && WEXITSTATUS(status) == 0, "serve did not exit cleanly");
  compared += 2;

  return c.outcome(std::to_string(compared) + " endpoint/subcommand payloads equal direct engine calls");
}

struct Criterion {
  int number;
  std::string name;
  double budget_ms;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "storage arithmetic", 1.0, storage_arithmetic},
      {2, "attention normalization", 30'000.0, attention_normalization},
      {3, "forward-pass oracle", 10'000.0, forward_oracle},
      {4, "perturbation oracle equivalence", 60'000.0, perturbation_oracle},
      {5, "PCA derivation", 1'000.0, pca_derivation},
      {6, "grammar fixtures", 1'000.0, grammar_fixtures},
      {7, "provenance monotonicity and recovery", 5'000.0, provenance_recovery},
      {8, "global-attention mode contract", 10'000.0, global_mode_contract},
      {9, "API/CLI equivalence", 30'000.0, api_cli_equivalence},
  };

  // Criterion 6 times the corrections, not the one-off dictionary load.
  (void)support::bundled_resources();

  int failed = 0;
  for (const auto& criterion : criteria) {
    const auto start = Clock::now();
    Outcome outcome;
    try {
      outcome = criterion.run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const double ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    const bool in_time = ms < criterion.budget_ms;
    const bool pass = outcome.ok && in_time;
    if (!pass) ++failed;
    std::ostringstream line;
    line.setf(std::ios::fixed);
    line.precision(3);
    line << (pass ? "PASS" : "FAIL") << "  " << criterion.number << ". " << criterion.name << "  (" << ms
         << " ms, limit " << criterion.budget_ms << " ms)  " << outcome.detail;
    if (!in_time) line << "  [over time budget]";
    std::cout << line.str() << std::endl;
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
  return failed == 0 ? 0 : 1;
}
