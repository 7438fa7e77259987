#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace scorelens::perturb {

/// Lowercase stop words; '#' lines are comments.
class StopWords {
 public:
  StopWords() = default;
  explicit StopWords(std::unordered_set<std::string> words) : words_(std::move(words)) {}
  static StopWords load(const std::filesystem::path& path);

  bool contains(std::string_view lowered) const { return words_.contains(std::string(lowered)); }
  std::size_t size() const { return words_.size(); }

 private:
  std::unordered_set<std::string> words_;
};

/// Synonym lexicon, one entry per line: "word<TAB>lemma1,lemma2,...".
/// Lookups are by lowercased word; lemma order is preserved.
class Lexicon {
 public:
  Lexicon() = default;
  static Lexicon load(const std::filesystem::path& path);

  void add(std::string word, std::vector<std::string> lemmas);
  const std::vector<std::string>& synonyms(std::string_view lowered) const;
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }

 private:
  std::unordered_map<std::string, std::vector<std::string>> entries_;
};

/// Word frequencies, one entry per line: "word<SPACE>count".
class FrequencyDictionary {
 public:
  FrequencyDictionary() = default;
  static FrequencyDictionary load(const std::filesystem::path& path);

  void add(std::string word, std::uint64_t count);

  /// 0 when absent.
  std::uint64_t count(std::string_view word) const;
  bool contains(std::string_view word) const { return count(word) > 0; }

  std::uint64_t total() const { return total_; }
  std::size_t size() const { return words_.size(); }
  std::size_t max_word_length() const { return max_len_; }

  const std::vector<std::string>& words() const { return words_; }
  std::uint64_t count_at(std::size_t index) const { return counts_[index]; }

 private:
  std::vector<std::string> words_;
  std::vector<std::uint64_t> counts_;
  std::unordered_map<std::string, std::size_t> index_;
  std::uint64_t total_ = 0;
  std::size_t max_len_ = 0;
};

}  // namespace scorelens::perturb
