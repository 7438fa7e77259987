#include "scorelens/perturb/spelling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_set>

#include "scorelens/error.hpp"
#include "scorelens/text/segmentation.hpp"

namespace scorelens::perturb {

namespace {

std::uint64_t hash_bytes(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void collect_deletes(const std::string& word, int depth, std::unordered_set<std::string>& out) {
  if (depth == 0 || word.empty()) return;
  for (std::size_t i = 0; i < word.size(); ++i) {
    std::string d = word.substr(0, i) + word.substr(i + 1);
    if (out.insert(d).second) collect_deletes(d, depth - 1, out);
  }
}

std::unordered_set<std::string> deletes_of(std::string_view word, int depth) {
  std::unordered_set<std::string> out;
  out.insert(std::string(word));
  collect_deletes(std::string(word), depth, out);
  return out;
}

bool better(const Suggestion& a, const Suggestion& b) {
  if (a.distance != b.distance) return a.distance < b.distance;
  if (a.count != b.count) return a.count > b.count;
  return a.term < b.term;
}

}  // namespace

int osa_distance(std::string_view a, std::string_view b, int max_distance) {
  const std::size_t n = a.size(), m = b.size();
  if (static_cast<int>(n > m ? n - m : m - n) > max_distance) return -1;
  // three rolling rows for the transposition lookback
  std::vector<int> prev2(m + 1), prev(m + 1), cur(m + 1);
  for (std::size_t j = 0; j <= m; ++j) prev[j] = static_cast<int>(j);
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = static_cast<int>(i);
    int row_min = cur[0];
    for (std::size_t j = 1; j <= m; ++j) {
      const int cost = a[i - 1] == b[j - 1] ? 0 : 1;
      int v = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + cost});
      if (i > 1 && j > 1 && a[i - 1] == b[j - 2] && a[i - 2] == b[j - 1]) v = std::min(v, prev2[j - 2] + 1);
      cur[j] = v;
      row_min = std::min(row_min, v);
    }
    if (row_min > max_distance) return -1;
    std::swap(prev2, prev);
    std::swap(prev, cur);
  }
  return prev[m] <= max_distance ? prev[m] : -1;
}

SpellIndex::SpellIndex(std::shared_ptr<const FrequencyDictionary> dictionary, int max_edit_distance)
    : dict_(std::move(dictionary)), max_edit_(max_edit_distance) {
  if (!dict_) throw InvalidArgument("spell index needs a dictionary");
  if (max_edit_ < 0) throw InvalidArgument("max edit distance must be >= 0");
  const auto& words = dict_->words();
  for (std::size_t i = 0; i < words.size(); ++i) {
    for (const auto& d : deletes_of(words[i], max_edit_)) {
      deletes_.emplace_back(hash_bytes(d), static_cast<std::uint32_t>(i));
    }
  }
  std::sort(deletes_.begin(), deletes_.end());
}

std::vector<Suggestion> SpellIndex::lookup(std::string_view word, int max_distance) const {
  max_distance = std::min(max_distance, max_edit_);
  std::vector<Suggestion> out;
  if (word.empty()) return out;
  std::unordered_set<std::uint32_t> seen;
  const auto& words = dict_->words();
  for (const auto& candidate : deletes_of(word, max_distance)) {
    const auto h = hash_bytes(candidate);
    auto [lo, hi] = std::equal_range(deletes_.begin(), deletes_.end(), std::pair<std::uint64_t, std::uint32_t>{h, 0},
                                     [](const auto& a, const auto& b) { return a.first < b.first; });
    for (auto it = lo; it != hi; ++it) {
      if (!seen.insert(it->second).second) continue;
      const auto& term = words[it->second];
      const int d = osa_distance(word, term, max_distance);
      if (d >= 0) out.push_back({term, d, dict_->count_at(it->second)});
    }
  }
  std::sort(out.begin(), out.end(), better);
  return out;
}

std::optional<Suggestion> SpellIndex::best(std::string_view word, int max_distance) const {
  auto all = lookup(word, max_distance);
  if (all.empty()) return std::nullopt;
  return all.front();
}

std::string SpellIndex::lookup_compound(std::string_view input, int max_distance) const {
  std::vector<std::string> terms;
  {
    std::size_t i = 0;
    while (i < input.size()) {
      while (i < input.size() && text::is_space(static_cast<unsigned char>(input[i]))) ++i;
      std::size_t j = i;
      while (j < input.size() && !text::is_space(static_cast<unsigned char>(input[j]))) ++j;
      if (j > i) terms.emplace_back(input.substr(i, j - i));
      i = j;
    }
  }

  const double n = static_cast<double>(std::max<std::uint64_t>(1, dict_->total()));
  auto unknown = [&](const std::string& term) {
    return Suggestion{term, max_distance + 1,
                      static_cast<std::uint64_t>(10.0 / std::pow(10.0, static_cast<double>(term.size())))};
  };

  std::vector<Suggestion> parts;
  bool last_combined = false;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const auto& term = terms[i];
    const auto suggestions = lookup(term, max_distance);

    // try merging with the previous term
    if (i > 0 && !last_combined) {
      const auto combined = lookup(terms[i - 1] + term, max_distance);
      if (!combined.empty()) {
        const auto& best1 = parts.back();
        const Suggestion best2 = suggestions.empty() ? unknown(term) : suggestions.front();
        const int distance_sum = best1.distance + best2.distance;
        const auto& merged = combined.front();
        if (merged.distance + 1 < distance_sum ||
            (merged.distance + 1 == distance_sum &&
             static_cast<double>(merged.count) > static_cast<double>(best1.count) / n * static_cast<double>(best2.count))) {
          parts.back() = merged;
          parts.back().distance += 1;
          last_combined = true;
          continue;
        }
      }
    }
    last_combined = false;

    if (!suggestions.empty() && (suggestions.front().distance == 0 || term.size() == 1)) {
      parts.push_back(suggestions.front());
      continue;
    }

    // try splitting the term in two
    std::optional<Suggestion> best_split;
    if (!suggestions.empty()) best_split = suggestions.front();
    for (std::size_t j = 1; j < term.size(); ++j) {
      const auto s1 = lookup(term.substr(0, j), max_distance);
      if (s1.empty()) continue;
      const auto s2 = lookup(term.substr(j), max_distance);
      if (s2.empty()) continue;
      Suggestion split{s1.front().term + " " + s2.front().term, 0, 0};
      int d = osa_distance(term, split.term, max_distance);
      if (d < 0) d = max_distance + 1;
      if (best_split) {
        if (d > best_split->distance) continue;
        if (d < best_split->distance) best_split.reset();
      }
      split.distance = d;
      split.count = static_cast<std::uint64_t>(static_cast<double>(s1.front().count) / n *
                                               static_cast<double>(s2.front().count));
      // a split that only inserts a space outranks corrected splits
      if (s1.front().term + s2.front().term == term) {
        split.count = std::max(split.count, std::max(s1.front().count, s2.front().count) + 2);
      }
      if (!best_split || split.count > best_split->count) best_split = split;
    }
    parts.push_back(best_split ? *best_split : unknown(term));
  }

  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out += ' ';
    out += p.term;
  }
  return out;
}

double segment_log_probability(const FrequencyDictionary& dictionary, std::string_view piece) {
  const double n = static_cast<double>(std::max<std::uint64_t>(1, dictionary.total()));
  const auto c = dictionary.count(piece);
  if (c > 0) return std::log10(static_cast<double>(c) / n);
  return std::log10(10.0 / n) - static_cast<double>(piece.size());
}

std::vector<std::pair<std::size_t, std::size_t>> segment_words(const FrequencyDictionary& dictionary,
                                                               std::string_view s) {
  const std::size_t m = s.size();
  std::vector<std::pair<std::size_t, std::size_t>> out;
  if (m == 0) return out;
  const std::size_t max_word = std::max<std::size_t>(1, dictionary.max_word_length());

  auto boundary = [&](std::size_t i) {
    return i == 0 || i == m || (static_cast<unsigned char>(s[i]) & 0xC0) != 0x80;
  };

  std::vector<double> best(m + 1, -std::numeric_limits<double>::infinity());
  std::vector<std::size_t> from(m + 1, 0);
  best[0] = 0.0;
  for (std::size_t i = 1; i <= m; ++i) {
    if (!boundary(i)) continue;
    const std::size_t lo = i > max_word ? i - max_word : 0;
    for (std::size_t j = lo; j < i; ++j) {
      if (!boundary(j) || best[j] == -std::numeric_limits<double>::infinity()) continue;
      const double v = best[j] + segment_log_probability(dictionary, s.substr(j, i - j));
      if (v > best[i]) {
        best[i] = v;
        from[i] = j;
      }
    }
    // a piece longer than any dictionary word is only ever unknown; allow it whole
    if (i > max_word && best[i] == -std::numeric_limits<double>::infinity()) {
      best[i] = segment_log_probability(dictionary, s.substr(0, i));
      from[i] = 0;
    }
  }
  for (std::size_t i = m; i > 0; i = from[i]) out.emplace_back(from[i], i);
  std::reverse(out.begin(), out.end());
  return out;
}

}  // namespace scorelens::perturb
