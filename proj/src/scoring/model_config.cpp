#include "scorelens/scoring/model_config.hpp"

#include <fstream>
#include <set>

#include "scorelens/error.hpp"

namespace scorelens::scoring {

using nlohmann::json;

std::string to_string(ModelKind kind) { return kind == ModelKind::reference ? "reference" : "external"; }
std::string to_string(GlobalMode mode) { return mode == GlobalMode::cls_only ? "cls_only" : "summary_global"; }

void ModelConfig::validate() const {
  auto fail = [&](const std::string& what) { throw InvalidArgument("model '" + model_id + "': " + what); };
  if (model_id.empty()) throw InvalidArgument("model_id must be non-empty");
  if (layers < 1) fail("layers must be >= 1");
  if (heads < 1) fail("heads must be >= 1");
  if (embed_dim == 0 || embed_dim % heads != 0) fail("embed_dim must be a positive multiple of heads");
  if (window < 2 || window % 2 != 0) fail("window must be even and >= 2");
  if (max_len < 3) fail("max_len must be >= 3");
  if (kind == ModelKind::external && endpoint.empty()) fail("external models need an endpoint");
}

ModelConfig ModelConfig::test_scale(std::string id, std::uint64_t seed) {
  ModelConfig c;
  c.model_id = std::move(id);
  c.seed = seed;
  return c;
}

ModelConfig ModelConfig::full_scale(std::string id, std::size_t window, std::uint64_t seed) {
  ModelConfig c;
  c.model_id = std::move(id);
  c.layers = 12;
  c.heads = 12;
  c.embed_dim = 768;
  c.window = window;
  c.max_len = 4096;
  c.seed = seed;
  return c;
}

json to_json(const ModelConfig& c, bool redact) {
  json j{{"model_id", c.model_id},
         {"kind", to_string(c.kind)},
         {"layers", c.layers},
         {"heads", c.heads},
         {"embed_dim", c.embed_dim},
         {"window", c.window},
         {"max_len", c.max_len},
         {"global_mode", to_string(c.global_mode)},
         {"score_dimension", c.score_dimension},
         {"tokenizer", c.tokenizer}};
  if (!redact) {
    if (c.kind == ModelKind::reference) j["seed"] = c.seed;
    if (c.kind == ModelKind::external) j["endpoint"] = c.endpoint;
  }
  if (c.mask_token) j["mask_token"] = *c.mask_token;
  return j;
}

namespace {

template <typename T>
T field_as(const json& j, const std::string& key, const std::string& path, T fallback) {
  const auto it = j.find(key);
  if (it == j.end()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw SchemaError(path + "." + key, "wrong type");
  }
}

std::size_t count_field(const json& j, const std::string& key, const std::string& path, std::size_t fallback) {
  const auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_number_integer() || it->get<long long>() < 0) throw SchemaError(path + "." + key, "expected non-negative integer");
  return it->get<std::size_t>();
}

}  // namespace

ModelConfig model_config_from_json(const json& j, const std::string& path) {
  if (!j.is_object()) throw SchemaError(path, "expected object");
  ModelConfig c;
  c.model_id = field_as<std::string>(j, "model_id", path, "");
  if (c.model_id.empty()) throw SchemaError(path + ".model_id", "missing");

  const auto kind = field_as<std::string>(j, "kind", path, "reference");
  if (kind == "reference") c.kind = ModelKind::reference;
  else if (kind == "external") c.kind = ModelKind::external;
  else throw SchemaError(path + ".kind", "expected reference or external");

  c.layers = count_field(j, "layers", path, c.layers);
  c.heads = count_field(j, "heads", path, c.heads);
  c.embed_dim = count_field(j, "embed_dim", path, c.embed_dim);
  c.window = count_field(j, "window", path, c.window);
  c.max_len = count_field(j, "max_len", path, c.max_len);

  const auto mode = field_as<std::string>(j, "global_mode", path, "cls_only");
  if (mode == "cls_only") c.global_mode = GlobalMode::cls_only;
  else if (mode == "summary_global") c.global_mode = GlobalMode::summary_global;
  else throw SchemaError(path + ".global_mode", "expected cls_only or summary_global");

  c.seed = field_as<std::uint64_t>(j, "seed", path, 0);
  c.endpoint = field_as<std::string>(j, "endpoint", path, "");
  c.score_dimension = field_as<std::string>(j, "score_dimension", path, "content");
  c.tokenizer = field_as<std::string>(j, "tokenizer", path, "reference");
  if (j.contains("mask_token")) c.mask_token = field_as<std::string>(j, "mask_token", path, "");

  try {
    c.validate();
  } catch (const InvalidArgument& e) {
    throw SchemaError(path, e.what());
  }
  return c;
}

std::vector<ModelConfig> load_model_configs(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw EngineError("cannot read models file " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw SchemaError("models", std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_array()) throw SchemaError("models", "expected an array of model records");
  std::vector<ModelConfig> out;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < j.size(); ++i) {
    auto c = model_config_from_json(j[i], "models[" + std::to_string(i) + "]");
    if (!seen.insert(c.model_id).second) throw SchemaError("models[" + std::to_string(i) + "].model_id", "duplicate id");
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace scorelens::scoring
