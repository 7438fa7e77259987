#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace scorelens::text {

enum class SpanKind { word, punctuation, sentence, subword };

std::string_view to_string(SpanKind kind);

/// A half-open byte range [start, end) into some source string, together with
/// the exact bytes it covers.
struct TextSpan {
  std::size_t start = 0;
  std::size_t end = 0;
  SpanKind kind = SpanKind::word;
  std::string surface;

  std::size_t size() const { return end - start; }
  friend bool operator==(const TextSpan&, const TextSpan&) = default;
};

TextSpan make_span(std::string_view text, std::size_t start, std::size_t end, SpanKind kind);

/// Lowercased abbreviations (without the trailing period) that must not end a
/// sentence or lose their period during word splitting.
class AbbreviationList {
 public:
  AbbreviationList();  // built-in English list
  explicit AbbreviationList(std::unordered_set<std::string> entries);

  /// One abbreviation per line; '#' starts a comment.
  static AbbreviationList load(const std::filesystem::path& path);

  /// Case-insensitive.
  bool contains(std::string_view word_without_period) const;
  std::size_t size() const { return entries_.size(); }

 private:
  std::unordered_set<std::string> entries_;
};

/// Penn-Treebank style word splitting. Contractions are split into clitics
/// ("don't" -> "do" "n't"), attached punctuation becomes punctuation spans.
std::vector<TextSpan> split_words(std::string_view text);
std::vector<TextSpan> split_words(std::string_view text, const AbbreviationList& abbreviations);

/// Rule-based sentence boundaries: terminal . ! ? followed by whitespace and an
/// uppercase letter/digit/opening quote, or by end of text. Blank lines are
/// hard boundaries. Spans exclude surrounding whitespace.
std::vector<TextSpan> split_sentences(std::string_view text);
std::vector<TextSpan> split_sentences(std::string_view text, const AbbreviationList& abbreviations);

// Byte-class helpers shared with the tokenizers.
bool is_space(unsigned char c);
bool is_word_byte(unsigned char c);  // ASCII alnum or any non-ASCII byte
std::size_t utf8_length(unsigned char lead);
std::string ascii_lower(std::string_view s);

}  // namespace scorelens::text
