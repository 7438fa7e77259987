#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace scorelens::scoring {

enum class ModelKind { reference, external };
enum class GlobalMode { cls_only, summary_global };

std::string to_string(ModelKind kind);
std::string to_string(GlobalMode mode);

struct ModelConfig {
  std::string model_id;
  ModelKind kind = ModelKind::reference;
  std::size_t layers = 4;
  std::size_t heads = 4;
  std::size_t embed_dim = 32;
  std::size_t window = 8;  // total sliding width; each side sees window / 2
  std::size_t max_len = 512;
  GlobalMode global_mode = GlobalMode::cls_only;
  std::uint64_t seed = 0;            // reference only
  std::string endpoint;              // external only, e.g. http://127.0.0.1:9000
  std::string score_dimension = "content";
  std::string tokenizer = "reference";
  std::optional<std::string> mask_token;  // external scorers; defaults to "[MASK]"

  /// Throws InvalidArgument on the first broken invariant.
  void validate() const;

  /// Small configuration used by tests and the bundled models.
  static ModelConfig test_scale(std::string id, std::uint64_t seed);
  /// 12 layers, 12 heads, d=768, max_len 4096.
  static ModelConfig full_scale(std::string id, std::size_t window, std::uint64_t seed);
};

/// `redact` drops the endpoint (and seed) for public listings.
nlohmann::json to_json(const ModelConfig& config, bool redact = false);

/// Throws SchemaError naming the field.
ModelConfig model_config_from_json(const nlohmann::json& j, const std::string& field = "model");

/// JSON array of ModelConfig records.
std::vector<ModelConfig> load_model_configs(const std::filesystem::path& path);

}  // namespace scorelens::scoring
