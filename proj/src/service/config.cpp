#include "scorelens/service/config.hpp"

#include <cstdlib>
#include <fstream>

#include "scorelens/error.hpp"

namespace scorelens::service {

namespace {

const std::filesystem::path kDataDir = SCORELENS_DATA_DIR;

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

void require_readable(const std::filesystem::path& p, const char* what) {
  std::ifstream in(p);
  if (!in) throw InvalidArgument(std::string(what) + " is not readable: " + p.string());
}

}  // namespace

ServiceConfig ServiceConfig::defaults() {
  ServiceConfig c;
  c.lexicon = kDataDir / "lexicon.tsv";
  c.dictionary = kDataDir / "frequency_dictionary_en.txt";
  c.stopwords = kDataDir / "stopwords.txt";
  c.abbreviations = kDataDir / "abbreviations.txt";
  c.training_corpus = kDataDir / "training_corpus.jsonl";
  return c;
}

ServiceConfig ServiceConfig::from_json(const nlohmann::json& j, const std::filesystem::path& base) {
  if (!j.is_object()) throw SchemaError("config", "expected an object");
  ServiceConfig c = defaults();
  auto str = [&](const char* key) -> std::optional<std::string> {
    if (!j.contains(key) || j[key].is_null()) return std::nullopt;
    if (!j[key].is_string()) throw SchemaError(key, "expected a string");
    return j[key].get<std::string>();
  };
  auto count = [&](const char* key, std::size_t& out) {
    if (!j.contains(key)) return;
    if (!j[key].is_number_unsigned()) throw SchemaError(key, "expected a non-negative integer");
    out = j[key].get<std::size_t>();
  };
  if (auto v = str("listen")) c.listen = *v;
  if (j.contains("port")) {
    if (!j["port"].is_number_integer()) throw SchemaError("port", "expected an integer");
    c.port = j["port"].get<int>();
  }
  if (auto v = str("models")) c.models = resolve(base, *v);
  if (auto v = str("lexicon")) c.lexicon = resolve(base, *v);
  if (auto v = str("dictionary")) c.dictionary = resolve(base, *v);
  if (auto v = str("stopwords")) c.stopwords = resolve(base, *v);
  if (auto v = str("abbreviations")) c.abbreviations = resolve(base, *v);
  if (auto v = str("training_corpus")) c.training_corpus = resolve(base, *v);
  if (auto v = str("event_log")) c.event_log = resolve(base, *v);
  if (j.contains("external_timeout_s")) {
    if (!j["external_timeout_s"].is_number()) throw SchemaError("external_timeout_s", "expected a number");
    c.external_timeout_s = j["external_timeout_s"].get<double>();
  }
  count("workers", c.workers);
  count("job_workers", c.job_workers);
  count("attention_cache", c.attention_cache);
  count("max_connections", c.max_connections);
  return c;
}

ServiceConfig ServiceConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot read config " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError("config", e.what());
  }
  return from_json(j, path.parent_path());
}

void ServiceConfig::validate() const {
  if (port < 0 || port > 65535) throw InvalidArgument("port must be in [0, 65535]");
  if (workers == 0) throw InvalidArgument("workers must be positive");
  if (job_workers == 0) throw InvalidArgument("job_workers must be positive");
  if (attention_cache == 0) throw InvalidArgument("attention_cache must be positive");
  if (max_connections == 0) throw InvalidArgument("max_connections must be positive");
  if (!(external_timeout_s > 0)) throw InvalidArgument("external_timeout_s must be positive");
  if (models) require_readable(*models, "models file");
  require_readable(lexicon, "lexicon");
  require_readable(dictionary, "dictionary");
  require_readable(stopwords, "stop-word list");
  if (abbreviations) require_readable(*abbreviations, "abbreviation list");
  if (training_corpus) require_readable(*training_corpus, "training corpus");
}

std::vector<scoring::ModelConfig> builtin_models() {
  auto content = scoring::ModelConfig::test_scale("content", 11);
  content.score_dimension = "content";
  auto wording = scoring::ModelConfig::test_scale("wording", 23);
  wording.score_dimension = "wording";
  return {content, wording};
}

std::vector<scoring::ModelConfig> ServiceConfig::model_configs() const {
  return models ? scoring::load_model_configs(*models) : builtin_models();
}

std::optional<std::filesystem::path> resolve_config_path(const std::optional<std::string>& flag) {
  if (flag && !flag->empty()) return std::filesystem::path(*flag);
  if (const char* env = std::getenv("SCORELENS_CONFIG"); env && *env) return std::filesystem::path(env);
  return std::nullopt;
}

nlohmann::json to_json(const ServiceConfig& c) {
  auto opt = [](const std::optional<std::filesystem::path>& p) {
    return p ? nlohmann::json(p->string()) : nlohmann::json(nullptr);
  };
  return {{"listen", c.listen},
          {"port", c.port},
          {"models", opt(c.models)},
          {"lexicon", c.lexicon.string()},
          {"dictionary", c.dictionary.string()},
          {"stopwords", c.stopwords.string()},
          {"abbreviations", opt(c.abbreviations)},
          {"training_corpus", opt(c.training_corpus)},
          {"event_log", c.event_log.string()},
          {"external_timeout_s", c.external_timeout_s},
          {"workers", c.workers},
          {"job_workers", c.job_workers},
          {"attention_cache", c.attention_cache},
          {"max_connections", c.max_connections}};
}

}  // namespace scorelens::service
