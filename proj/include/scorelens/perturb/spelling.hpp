#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "scorelens/perturb/resources.hpp"

namespace scorelens::perturb {

struct Suggestion {
  std::string term;
  int distance = 0;
  std::uint64_t count = 0;

  friend bool operator==(const Suggestion&, const Suggestion&) = default;
};

/// Restricted Damerau-Levenshtein (optimal string alignment) distance.
/// Returns -1 when the distance exceeds max_distance.
int osa_distance(std::string_view a, std::string_view b, int max_distance);

/// Symmetric-delete spelling index over a frequency dictionary. Every
/// dictionary word is indexed under all strings reachable by deleting up to
/// max_edit_distance bytes; a query generates its own deletes and verifies
/// candidates with the true edit distance.
class SpellIndex {
 public:
  static constexpr int kDefaultMaxEditDistance = 2;

  explicit SpellIndex(std::shared_ptr<const FrequencyDictionary> dictionary,
                      int max_edit_distance = kDefaultMaxEditDistance);

  const FrequencyDictionary& dictionary() const { return *dict_; }
  int max_edit_distance() const { return max_edit_; }

  /// All dictionary words within max_distance of `word` (lowercase), ordered
  /// by distance, then descending count, then term.
  std::vector<Suggestion> lookup(std::string_view word, int max_distance) const;

  /// Closest, most frequent suggestion.
  std::optional<Suggestion> best(std::string_view word, int max_distance) const;

  /// Compound-aware correction of lowercase, whitespace-separated text: terms
  /// may be split in two or merged with their predecessor. Returns the
  /// corrected words joined by single spaces.
  std::string lookup_compound(std::string_view text, int max_distance) const;

 private:
  std::shared_ptr<const FrequencyDictionary> dict_;
  int max_edit_;
  std::vector<std::pair<std::uint64_t, std::uint32_t>> deletes_;  // (hash of delete, word index), sorted
};

/// Splits a lowercase run with no spaces into the word sequence maximizing
/// the product of dictionary word probabilities. Unknown pieces are scored
/// 10 / (N * 10^len). Returns [start, end) byte ranges.
std::vector<std::pair<std::size_t, std::size_t>> segment_words(const FrequencyDictionary& dictionary,
                                                               std::string_view lowered);

/// log10 probability used by segment_words for one piece.
double segment_log_probability(const FrequencyDictionary& dictionary, std::string_view piece);

}  // namespace scorelens::perturb
