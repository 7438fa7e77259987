#include "scorelens/text/segmentation.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <utility>

#include "scorelens/error.hpp"

namespace scorelens::text {

std::string_view to_string(SpanKind kind) {
  switch (kind) {
    case SpanKind::word: return "word";
    case SpanKind::punctuation: return "punctuation";
    case SpanKind::sentence: return "sentence";
    case SpanKind::subword: return "subword";
  }
  return "word";
}

TextSpan make_span(std::string_view text, std::size_t start, std::size_t end, SpanKind kind) {
  return TextSpan{start, end, kind, std::string(text.substr(start, end - start))};
}

bool is_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_word_byte(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80;
}

std::size_t utf8_length(unsigned char lead) {
  if (lead < 0x80) return 1;
  if ((lead >> 5) == 0x6) return 2;
  if ((lead >> 4) == 0xE) return 3;
  if ((lead >> 3) == 0x1E) return 4;
  return 1;  // stray continuation byte, treat as a unit
}

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

namespace {

constexpr std::array kDefaultAbbreviations = {
    "mr",  "mrs",  "ms",   "dr",   "prof", "sr",  "jr",  "st",   "vs",   "etc", "e.g", "i.e",
    "inc", "ltd",  "co",   "corp", "jan",  "feb", "apr", "jun",  "jul",  "aug", "sep", "sept",
    "oct", "nov",  "dec",  "fig",  "approx", "dept", "est", "gen", "gov", "sen", "rep", "capt",
    "col", "lt",   "sgt",  "mt",   "ave",  "u.s", "u.k", "a.m",  "p.m",  "cf",  "al",  "vol",
    "pp",  "ed",   "eds",  "ph.d", "b.c", "a.d", "viz",  "ca"};

bool is_digit(unsigned char c) { return c >= '0' && c <= '9'; }
bool is_upper(unsigned char c) { return c >= 'A' && c <= 'Z'; }

bool contains_word_byte(std::string_view s) {
  return std::any_of(s.begin(), s.end(), [](char c) { return is_word_byte(static_cast<unsigned char>(c)); });
}

// Penn-Treebank contractions that split at a fixed offset.
struct FixedSplit {
  std::string_view word;
  std::size_t at;
};
constexpr std::array kFixedSplits = {
    FixedSplit{"cannot", 3}, FixedSplit{"d'ye", 2},  FixedSplit{"gimme", 3}, FixedSplit{"gonna", 3},
    FixedSplit{"gotta", 3},  FixedSplit{"lemme", 3}, FixedSplit{"more'n", 4}, FixedSplit{"wanna", 3},
    FixedSplit{"'tis", 2},   FixedSplit{"'twas", 2},
};

constexpr std::array<std::string_view, 4> kLongClitics = {"n't", "'ll", "'re", "'ve"};
constexpr std::array<std::string_view, 3> kShortClitics = {"'s", "'m", "'d"};

constexpr std::string_view kAlwaysSplit = "?!;@#$&%()[]{}<>\"`";

class WordSplitter {
 public:
  WordSplitter(std::string_view text, const AbbreviationList& abbreviations)
      : text_(text), abbreviations_(abbreviations) {}

  std::vector<TextSpan> run() {
    std::size_t i = 0;
    while (i < text_.size()) {
      while (i < text_.size() && is_space(static_cast<unsigned char>(text_[i]))) ++i;
      std::size_t j = i;
      while (j < text_.size() && !is_space(static_cast<unsigned char>(text_[j]))) ++j;
      if (j > i) chunk(i, j);
      i = j;
    }
    return std::move(out_);
  }

 private:
  void emit(std::size_t a, std::size_t b) {
    if (a >= b) return;
    const auto kind = contains_word_byte(text_.substr(a, b - a)) ? SpanKind::word : SpanKind::punctuation;
    out_.push_back(make_span(text_, a, b, kind));
  }

  bool starts_with_at(std::size_t pos, std::size_t end, std::string_view needle) const {
    return end - pos >= needle.size() && text_.substr(pos, needle.size()) == needle;
  }

  bool is_clitic_word(std::size_t s, std::size_t e) const {
    const auto lower = ascii_lower(text_.substr(s, e - s));
    for (auto c : kLongClitics) if (lower == c) return true;
    for (auto c : kShortClitics) if (lower == c) return true;
    return lower == "'tis" || lower == "'twas";
  }

  void chunk(std::size_t s, std::size_t e) {
    // leading punctuation
    while (s < e) {
      const auto c = static_cast<unsigned char>(text_[s]);
      if (starts_with_at(s, e, "...")) { emit(s, s + 3); s += 3; continue; }
      if (starts_with_at(s, e, "--")) { emit(s, s + 2); s += 2; continue; }
      if (kAlwaysSplit.find(static_cast<char>(c)) != std::string_view::npos || c == ',' || c == ':') {
        emit(s, s + 1); ++s; continue;
      }
      if (c == '\'' && e - s > 1 && !is_clitic_word(s, e)) { emit(s, s + 1); ++s; continue; }
      break;
    }

    // trailing punctuation, emitted after the core in reverse order
    std::vector<std::pair<std::size_t, std::size_t>> tail;
    while (e > s) {
      const auto c = static_cast<unsigned char>(text_[e - 1]);
      if (e - s >= 3 && text_.substr(e - 3, 3) == "...") { tail.emplace_back(e - 3, e); e -= 3; continue; }
      if (e - s >= 2 && text_.substr(e - 2, 2) == "--") { tail.emplace_back(e - 2, e); e -= 2; continue; }
      if (kAlwaysSplit.find(static_cast<char>(c)) != std::string_view::npos || c == ',' || c == ':') {
        tail.emplace_back(e - 1, e); --e; continue;
      }
      if (c == '\'' && e - s > 1 && !is_clitic_word(s, e)) { tail.emplace_back(e - 1, e); --e; continue; }
      if (c == '.') {
        if (e - s == 1 || !keeps_period(s, e - 1)) { tail.emplace_back(e - 1, e); --e; continue; }
      }
      break;
    }

    core(s, e);
    for (auto it = tail.rbegin(); it != tail.rend(); ++it) emit(it->first, it->second);
  }

  // True when the period after [s,e) belongs to the word (abbreviation, initial, dotted acronym).
  bool keeps_period(std::size_t s, std::size_t e) const {
    const auto word = text_.substr(s, e - s);
    if (!contains_word_byte(word)) return false;
    if (word.find('.') != std::string_view::npos) return true;
    if (word.size() == 1 && is_upper(static_cast<unsigned char>(word[0]))) return true;
    return abbreviations_.contains(word);
  }

  void core(std::size_t s, std::size_t e) {
    std::size_t piece = s;
    std::size_t i = s;
    while (i < e) {
      const auto c = static_cast<unsigned char>(text_[i]);
      std::size_t len = 0;
      if (starts_with_at(i, e, "...")) {
        len = 3;
      } else if (starts_with_at(i, e, "--")) {
        len = 2;
      } else if (kAlwaysSplit.find(static_cast<char>(c)) != std::string_view::npos) {
        len = 1;
      } else if (c == ',' || c == ':') {
        const bool numeric = i > s && i + 1 < e && is_digit(static_cast<unsigned char>(text_[i - 1])) &&
                             is_digit(static_cast<unsigned char>(text_[i + 1]));
        if (!numeric) len = 1;
      }
      if (len == 0) {
        ++i;
        continue;
      }
      contractions(piece, i);
      emit(i, i + len);
      i += len;
      piece = i;
    }
    contractions(piece, e);
  }

  void contractions(std::size_t s, std::size_t e) {
    if (s >= e) return;
    const auto lower = ascii_lower(text_.substr(s, e - s));
    for (const auto& f : kFixedSplits) {
      if (lower == f.word) {
        emit(s, s + f.at);
        emit(s + f.at, e);
        return;
      }
    }
    auto ends = [&](std::string_view suffix) {
      return lower.size() > suffix.size() && std::string_view(lower).substr(lower.size() - suffix.size()) == suffix;
    };
    for (auto c : kLongClitics) {
      if (ends(c)) {
        contractions(s, e - 3);
        emit(e - 3, e);
        return;
      }
    }
    for (auto c : kShortClitics) {
      if (ends(c)) {
        contractions(s, e - 2);
        emit(e - 2, e);
        return;
      }
    }
    emit(s, e);
  }

  std::string_view text_;
  const AbbreviationList& abbreviations_;
  std::vector<TextSpan> out_;
};

const AbbreviationList& default_abbreviations() {
  static const AbbreviationList list;
  return list;
}

}  // namespace

AbbreviationList::AbbreviationList() {
  for (auto a : kDefaultAbbreviations) {
    std::string s(a);
    if (!s.empty() && s.back() == '.') s.pop_back();
    entries_.insert(std::move(s));
  }
}

AbbreviationList::AbbreviationList(std::unordered_set<std::string> entries) {
  for (const auto& e : entries) entries_.insert(ascii_lower(e));
}

AbbreviationList AbbreviationList::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw EngineError("cannot read abbreviation list " + path.string());
  std::unordered_set<std::string> entries;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    while (!line.empty() && is_space(static_cast<unsigned char>(line.back()))) line.pop_back();
    std::size_t b = 0;
    while (b < line.size() && is_space(static_cast<unsigned char>(line[b]))) ++b;
    line = ascii_lower(line.substr(b));
    if (!line.empty() && line.back() == '.') line.pop_back();
    if (!line.empty()) entries.insert(line);
  }
  return AbbreviationList(std::move(entries));
}

bool AbbreviationList::contains(std::string_view word) const {
  return entries_.contains(ascii_lower(word));
}

std::vector<TextSpan> split_words(std::string_view text) {
  return split_words(text, default_abbreviations());
}

std::vector<TextSpan> split_words(std::string_view text, const AbbreviationList& abbreviations) {
  return WordSplitter(text, abbreviations).run();
}

std::vector<TextSpan> split_sentences(std::string_view text) {
  return split_sentences(text, default_abbreviations());
}

std::vector<TextSpan> split_sentences(std::string_view text, const AbbreviationList& abbreviations) {
  std::vector<TextSpan> out;
  const std::size_t n = text.size();
  auto uc = [&](std::size_t i) { return static_cast<unsigned char>(text[i]); };

  auto close = [&](std::size_t start, std::size_t end) {
    while (end > start && is_space(uc(end - 1))) --end;
    if (end > start) out.push_back(make_span(text, start, end, SpanKind::sentence));
  };

  std::size_t start = 0;
  while (start < n && is_space(uc(start))) ++start;
  std::size_t i = start;

  while (i < n) {
    const auto c = uc(i);

    if (c == '\n') {
      std::size_t k = i + 1;
      bool blank = false;
      while (k < n && is_space(uc(k))) {
        if (uc(k) == '\n') blank = true;
        ++k;
      }
      if (blank) {
        close(start, i);
        start = k;
        i = k;
        continue;
      }
      ++i;
      continue;
    }

    if (c != '.' && c != '!' && c != '?') {
      ++i;
      continue;
    }

    std::size_t j = i;
    while (j < n && (uc(j) == '.' || uc(j) == '!' || uc(j) == '?')) ++j;
    const bool single_period = (j - i == 1 && c == '.');
    while (j < n && (uc(j) == '"' || uc(j) == '\'' || uc(j) == ')' || uc(j) == ']' || uc(j) == '}')) ++j;

    bool boundary = false;
    std::size_t next = j;
    if (j >= n) {
      boundary = true;
    } else if (is_space(uc(j))) {
      while (next < n && is_space(uc(next))) ++next;
      if (next >= n) {
        boundary = true;
      } else {
        const auto d = uc(next);
        boundary = is_upper(d) || is_digit(d) || d == '"' || d == '\'' || d == '(' || d == '[';
      }
    }

    if (boundary && single_period) {
      std::size_t w = i;
      while (w > start && !is_space(uc(w - 1))) --w;
      while (w < i && !is_word_byte(uc(w))) ++w;
      const auto word = text.substr(w, i - w);
      if (!word.empty()) {
        const bool initial = word.size() == 1 && is_upper(static_cast<unsigned char>(word[0]));
        if (initial || abbreviations.contains(word)) boundary = false;
      }
    }

    if (boundary) {
      close(start, j);
      start = next;
      i = next;
    } else {
      i = j;
    }
  }
  if (start < n) close(start, n);
  return out;
}

}  // namespace scorelens::text
