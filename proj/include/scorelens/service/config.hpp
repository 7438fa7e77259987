#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "scorelens/scoring/model_config.hpp"

namespace scorelens::service {

struct ServiceConfig {
  std::string listen = "127.0.0.1";
  int port = 8080;
  std::optional<std::filesystem::path> models;  // absent: built-in reference models
  std::filesystem::path lexicon;
  std::filesystem::path dictionary;
  std::filesystem::path stopwords;
  std::optional<std::filesystem::path> abbreviations;
  std::optional<std::filesystem::path> training_corpus;
  std::filesystem::path event_log;  // empty: in-memory
  double external_timeout_s = 60.0;
  std::size_t workers = 4;
  std::size_t job_workers = 2;
  std::size_t attention_cache = 8;
  std::size_t max_connections = 4;

  /// Bundled data files, built-in models, in-memory event log.
  static ServiceConfig defaults();

  /// Relative paths resolve against the file's directory. Unset keys keep
  /// their defaults. Throws SchemaError naming the key.
  static ServiceConfig load(const std::filesystem::path& path);
  static ServiceConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);

  /// Port range, positive counts, and every configured input path readable.
  void validate() const;

  std::vector<scoring::ModelConfig> model_configs() const;
};

/// Two test-scale reference models, "content" and "wording".
std::vector<scoring::ModelConfig> builtin_models();

/// --config flag, else $SCORELENS_CONFIG, else nothing.
std::optional<std::filesystem::path> resolve_config_path(const std::optional<std::string>& flag);

nlohmann::json to_json(const ServiceConfig& config);

}  // namespace scorelens::service
