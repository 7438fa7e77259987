// scorelens: command-line front end for the scoring workbench.

#include <atomic>
#include <chrono>
#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "scorelens/attention/attention_wire.hpp"
#include "scorelens/error.hpp"
#include "scorelens/perturb/perturbation.hpp"
#include "scorelens/provenance/components.hpp"
#include "scorelens/provenance/training_corpus.hpp"
#include "scorelens/service/config.hpp"
#include "scorelens/service/router.hpp"
#include "scorelens/service/server.hpp"
#include "scorelens/service/workbench.hpp"

namespace {

using nlohmann::json;
using namespace scorelens;

constexpr int kOk = 0;
constexpr int kEngineError = 1;
constexpr int kUsageError = 2;

std::atomic<bool> g_stop{false};

struct Globals {
  std::string config;
  std::string models;
  bool json = false;
};

service::ServiceConfig load_config(const Globals& g) {
  const auto path = service::resolve_config_path(g.config.empty() ? std::nullopt : std::optional(g.config));
  auto c = path ? service::ServiceConfig::load(*path) : service::ServiceConfig::defaults();
  if (!g.models.empty()) c.models = g.models;
  return c;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::shared_ptr<const scoring::Scorer> make_scorer(const service::ServiceConfig& c) {
  scoring::ExternalOptions external;
  external.timeout = std::chrono::milliseconds(static_cast<long long>(c.external_timeout_s * 1000.0));
  external.max_connections = static_cast<std::ptrdiff_t>(c.max_connections);
  return std::make_shared<const scoring::Scorer>(c.model_configs(), external);
}

void emit(const Globals& g, const json& payload, const std::string& human) {
  if (g.json) {
    std::cout << payload.dump() << '\n';
  } else {
    std::cout << human;
  }
}

int run_score(const Globals& g, const std::string& source_path, const std::string& summary_path,
              const std::string& model, bool want_attention) {
  const auto config = load_config(g);
  const auto scorer = make_scorer(config);
  const auto r = scorer->score_pair(model, read_file(source_path), read_file(summary_path), want_attention);
  auto payload = scoring::score_response_to_json(r);
  payload["model_id"] = r.model_id;
  std::ostringstream human;
  human << r.model_id << ": " << r.score << (r.truncated ? " (source truncated)" : "") << " over " << r.tokens.size()
        << " tokens\n";
  emit(g, payload, human.str());
  return kOk;
}

int run_perturb(const Globals& g, const std::string& source_path, const std::string& summary_path,
                const std::string& model, const std::string& method_name) {
  const auto method = perturb::method_from_string(method_name);
  const auto config = load_config(g);
  const auto scorer = make_scorer(config);
  const auto resources =
      perturb::PerturbationResources::load({config.stopwords, config.lexicon, config.dictionary, config.abbreviations});
  const perturb::PerturbationEngine engine(*scorer, resources, config.workers);
  const auto report = engine.run(read_file(source_path), read_file(summary_path), model, method);
  std::ostringstream human;
  human << report.model_id << " " << perturb::to_string(report.method) << " baseline " << report.baseline_score << '\n';
  for (const auto& v : report.variants) {
    human << "  ";
    if (v.span) human << "[" << v.span->start << "," << v.span->end << ") " << v.span->surface << " -> ";
    if (!v.label.empty()) human << v.label << ": ";
    human << v.replacement << "  delta " << v.delta << '\n';
  }
  emit(g, perturb::to_json(report), human.str());
  return kOk;
}

int run_attention(const Globals& g, const std::string& source_path, const std::string& summary_path,
                  const std::string& model, std::size_t token, std::size_t layer, std::size_t head,
                  const std::string& mode_name) {
  const auto kind = attention::slice_kind_from_string(mode_name);
  const auto mode = kind == attention::SliceMode::Kind::by_layer  ? attention::SliceMode::by_layer(head)
                    : kind == attention::SliceMode::Kind::by_head ? attention::SliceMode::by_head(layer)
                                                                  : attention::SliceMode::rug(layer, head);
  const auto config = load_config(g);
  const auto scorer = make_scorer(config);
  const auto r = scorer->score_pair(model, read_file(source_path), read_file(summary_path), true);
  const auto payload = service::slice_payload(r, token, mode);
  std::ostringstream human;
  const auto& cols = payload["cols"];
  for (std::size_t k = 0; k < payload["rows"].size(); ++k) {
    human << payload["rows"][k]["surface"].get<std::string>();
    for (std::size_t c = 0; c < cols.size(); ++c) {
      const auto& cell = payload["cells"][k][c];
      const auto s = cell["s"].get<std::string>();
      human << '\t' << (s == "w" ? std::to_string(cell["v"].get<double>()) : s == "z" ? "0" : ".");
    }
    human << '\n';
  }
  emit(g, payload, human.str());
  return kOk;
}

int run_ingest(const Globals& g, std::string corpus) {
  const auto config = load_config(g);
  if (corpus.empty()) {
    if (!config.training_corpus) throw InvalidArgument("no training corpus configured; pass --corpus");
    corpus = config.training_corpus->string();
  }
  provenance::TrainingCorpus c;
  const auto report = c.ingest(corpus);
  json rejected = json::array();
  std::ostringstream human;
  human << "accepted " << report.accepted << ", rejected " << report.rejected.size() << '\n';
  for (const auto& r : report.rejected) {
    rejected.push_back({{"line", r.line}, {"reason", r.reason}});
    human << "  line " << r.line << ": " << r.reason << '\n';
  }
  emit(g, {{"accepted", report.accepted}, {"rejected", rejected}}, human.str());
  return kOk;
}

int run_derive(const Globals& g, std::string corpus_path, bool write) {
  const auto config = load_config(g);
  if (corpus_path.empty()) {
    if (!config.training_corpus) throw InvalidArgument("no training corpus configured; pass --corpus");
    corpus_path = config.training_corpus->string();
  }
  provenance::TrainingCorpus corpus;
  const auto report = corpus.ingest(corpus_path);
  if (write && !report.rejected.empty()) {
    throw InvalidArgument("refusing to rewrite " + corpus_path + ": " + std::to_string(report.rejected.size()) +
                          " malformed lines would be lost");
  }
  std::vector<provenance::Rubric> rubric;
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < corpus.examples().size(); ++i) {
    if (const auto& r = corpus.examples()[i].rubric) {
      rubric.push_back(*r);
      rows.push_back(i);
    }
  }
  const auto scores = provenance::derive_component_scores(rubric);
  json examples = json::array();
  std::ostringstream human;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    auto& e = corpus.mutable_examples()[rows[k]];
    e.content = scores.content[k];
    e.wording = scores.wording[k];
    examples.push_back({{"example_id", e.example_id}, {"content", e.content}, {"wording", e.wording}});
    human << e.example_id << '\t' << e.content << '\t' << e.wording << '\n';
  }
  if (write) corpus.write(corpus_path);
  emit(g,
       {{"examples", examples},
        {"content_loading", scores.content_loading},
        {"wording_loading", scores.wording_loading},
        {"explained_variance", scores.explained_variance},
        {"written", write}},
       human.str());
  return kOk;
}

int run_serve(const Globals& g, std::optional<std::string> host, std::optional<int> port) {
  auto config = load_config(g);
  if (host) config.listen = *host;
  if (port) config.port = *port;
  const auto workbench = service::Workbench::from_config(config);
  const service::Router router(*workbench);
  service::HttpServer server(router, config.workers + 4);
  const int bound = server.start(config.listen, config.port);
  std::cerr << "scorelens listening on " << config.listen << ":" << bound << std::endl;
  std::signal(SIGINT, [](int) { g_stop = true; });
  std::signal(SIGTERM, [](int) { g_stop = true; });
  while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
  server.stop();
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Score, perturb and inspect summary-scoring models"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config, "Service config JSON (default: $SCORELENS_CONFIG, then built-in)");
  app.add_option("--models", g.models, "Model registry JSON array")->check(CLI::ExistingFile);
  app.add_flag("--json", g.json, "Machine-readable JSON on stdout");

  std::string source, summary, model, method, mode = "rug", corpus;
  std::size_t token = 0, layer = 0, head = 0;
  bool want_attention = false, write = false;
  std::optional<std::string> host;
  std::optional<int> port;

  auto* score = app.add_subcommand("score", "Score one source/summary pair");
  score->add_option("--source", source, "Source text file")->required()->check(CLI::ExistingFile);
  score->add_option("--summary", summary, "Summary text file")->required()->check(CLI::ExistingFile);
  score->add_option("--model", model, "Model id")->required();
  score->add_flag("--attention", want_attention, "Include the attention tensor");

  auto* perturb_cmd = app.add_subcommand("perturb", "Perturb a summary and rescore every variant");
  perturb_cmd->add_option("--source", source, "Source text file")->required()->check(CLI::ExistingFile);
  perturb_cmd->add_option("--summary", summary, "Summary text file")->required()->check(CLI::ExistingFile);
  perturb_cmd->add_option("--model", model, "Model id")->required();
  perturb_cmd->add_option("--method", method, "words, sentences, tokens or grammar")
      ->required()
      ->check(CLI::IsMember({"words", "sentences", "tokens", "grammar"}));

  auto* attn = app.add_subcommand("attention", "Slice the attention of one query token");
  attn->add_option("--source", source, "Source text file")->required()->check(CLI::ExistingFile);
  attn->add_option("--summary", summary, "Summary text file")->required()->check(CLI::ExistingFile);
  attn->add_option("--model", model, "Model id")->required();
  attn->add_option("--token", token, "Query token position")->required();
  attn->add_option("--layer", layer, "Layer (by_head, rug)");
  attn->add_option("--head", head, "Head (by_layer, rug)");
  attn->add_option("--mode", mode, "by_layer, by_head or rug")->check(CLI::IsMember({"by_layer", "by_head", "rug"}));

  auto* ingest = app.add_subcommand("ingest-training", "Validate a training corpus");
  ingest->add_option("--corpus", corpus, "Line-delimited JSON corpus (default: configured)")
      ->check(CLI::ExistingFile);

  auto* derive = app.add_subcommand("derive-scores", "Derive content/wording targets from rubric scores");
  derive->add_option("--corpus", corpus, "Line-delimited JSON corpus (default: configured)")
      ->check(CLI::ExistingFile);
  derive->add_flag("--write", write, "Rewrite the corpus with the derived targets");

  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  serve->add_option("--host", host, "Listen address");
  serve->add_option("--port", port, "Listen port (0 picks a free one)")->check(CLI::Range(0, 65535));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsageError;
  }

  try {
    if (*score) return run_score(g, source, summary, model, want_attention);
    if (*perturb_cmd) return run_perturb(g, source, summary, model, method);
    if (*attn) return run_attention(g, source, summary, model, token, layer, head, mode);
    if (*ingest) return run_ingest(g, corpus);
    if (*derive) return run_derive(g, corpus, write);
    if (*serve) return run_serve(g, host, port);
  } catch (const std::exception& e) {
    const auto err = service::describe_error(std::current_exception());
    if (g.json) {
      std::cout << err.body.dump() << '\n';
    }
    std::cerr << "error: " << e.what() << '\n';
    return kEngineError;
  }
  return kUsageError;
}
