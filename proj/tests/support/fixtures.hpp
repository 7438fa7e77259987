#pragma once

// Shared paths and loaders for the test binaries.

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "json.hpp"
#include "scorelens/perturb/perturbation.hpp"
#include "scorelens/scoring/model_config.hpp"

namespace support {

inline std::filesystem::path fixture(const std::string& name) {
  return std::filesystem::path(SCORELENS_FIXTURE_DIR) / name;
}

inline std::filesystem::path data(const std::string& name) {
  return std::filesystem::path(SCORELENS_DATA_DIR) / name;
}

inline std::string read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << bytes;
}

inline nlohmann::json read_json(const std::filesystem::path& path) { return nlohmann::json::parse(read(path)); }

struct Pair {
  std::string source;
  std::string summary;
};

inline std::vector<Pair> fixture_pairs() {
  std::vector<Pair> out;
  for (const auto& p : read_json(fixture("pairs.json"))) out.push_back({p["source"], p["summary"]});
  return out;
}

inline std::shared_ptr<const scorelens::perturb::PerturbationResources> bundled_resources() {
  static const auto resources = scorelens::perturb::PerturbationResources::load(
      {data("stopwords.txt"), data("lexicon.tsv"), data("frequency_dictionary_en.txt"), data("abbreviations.txt")});
  return resources;
}

/// Small reference configuration: L=2, H=2, d=8, w=4, seed 7.
inline scorelens::scoring::ModelConfig tiny_config(std::string id = "tiny", std::uint64_t seed = 7) {
  auto c = scorelens::scoring::ModelConfig::test_scale(std::move(id), seed);
  c.layers = 2;
  c.heads = 2;
  c.embed_dim = 8;
  c.window = 4;
  return c;
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("scorelens-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

/// Random text mixing ASCII words, punctuation, whitespace and multi-byte
/// characters.
inline std::string random_text(std::mt19937_64& rng, std::size_t pieces) {
  static const std::vector<std::string> alphabet = {
      "the", "Cat", "don't", "I'm", "sat", ".", ",", "!", "?", " ", " ", "  ", "\n", "\n\n", "(", ")", "\"",
      "'", "café", "naïve", "日本", "€", "x", "3.14", "U.S.", "Dr.", "won't", "--", "...", "[MASK]", "a", "Ω"};
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
  std::string out;
  for (std::size_t i = 0; i < pieces; ++i) {
    out += alphabet[pick(rng)];
    if (pick(rng) % 3 == 0) out += ' ';
  }
  return out;
}

}  // namespace support
