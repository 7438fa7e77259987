#include "scorelens/perturb/grammar.hpp"

#include <cctype>

#include "scorelens/text/segmentation.hpp"

namespace scorelens::perturb {

namespace {

bool is_ascii_punct(unsigned char c) { return c < 0x80 && std::ispunct(c); }

bool all_alpha(std::string_view w) {
  if (w.empty()) return false;
  for (unsigned char c : w) {
    if (!std::isalpha(c)) return false;
  }
  return true;
}

std::string transfer_case(std::string_view original, std::string replacement) {
  bool all_upper = original.size() > 1;
  for (unsigned char c : original) all_upper = all_upper && std::isupper(c);
  if (all_upper) {
    for (auto& c : replacement) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  } else if (!original.empty() && std::isupper(static_cast<unsigned char>(original[0])) && !replacement.empty()) {
    replacement[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(replacement[0])));
  }
  return replacement;
}

}  // namespace

std::string_view to_string(GrammarMode mode) {
  switch (mode) {
    case GrammarMode::single_word: return "single_word";
    case GrammarMode::compound: return "compound";
    case GrammarMode::segmentation: return "segmentation";
  }
  return "?";
}

std::string correct_single_words(std::string_view text, const SpellIndex& index) {
  std::string out;
  std::size_t cursor = 0;
  for (const auto& span : text::split_words(text)) {
    if (span.kind != text::SpanKind::word || !all_alpha(span.surface)) continue;
    const auto lowered = text::ascii_lower(span.surface);
    if (index.dictionary().contains(lowered)) continue;
    const auto best = index.best(lowered, index.max_edit_distance());
    if (!best) continue;
    out.append(text.substr(cursor, span.start - cursor));
    out += transfer_case(span.surface, best->term);
    cursor = span.end;
  }
  out.append(text.substr(cursor));
  return out;
}

std::string correct_compound(std::string_view text, const SpellIndex& index) {
  std::string normalized;
  normalized.reserve(text.size());
  for (unsigned char c : text) {
    if (c == '\'') continue;
    normalized += is_ascii_punct(c) ? ' ' : static_cast<char>(std::tolower(c));
  }
  return index.lookup_compound(normalized, index.max_edit_distance());
}

std::string segment_text(std::string_view text, const FrequencyDictionary& dictionary) {
  std::string out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && text::is_space(static_cast<unsigned char>(text[i]))) ++i;
    std::string chunk;
    while (i < text.size() && !text::is_space(static_cast<unsigned char>(text[i]))) {
      if (!is_ascii_punct(static_cast<unsigned char>(text[i]))) chunk += text[i];
      ++i;
    }
    if (chunk.empty()) continue;
    const auto lowered = text::ascii_lower(chunk);
    for (const auto& [b, e] : segment_words(dictionary, lowered)) {
      if (!out.empty()) out += ' ';
      out.append(chunk, b, e - b);
    }
  }
  return out;
}

std::string correct(GrammarMode mode, std::string_view text, const SpellIndex& index) {
  switch (mode) {
    case GrammarMode::single_word: return correct_single_words(text, index);
    case GrammarMode::compound: return correct_compound(text, index);
    case GrammarMode::segmentation: return segment_text(text, index.dictionary());
  }
  return std::string(text);
}

}  // namespace scorelens::perturb
