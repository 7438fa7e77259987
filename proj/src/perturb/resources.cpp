#include "scorelens/perturb/resources.hpp"

#include <charconv>
#include <fstream>

#include "scorelens/error.hpp"
#include "scorelens/text/segmentation.hpp"

namespace scorelens::perturb {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && text::is_space(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && text::is_space(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::ifstream open(const std::filesystem::path& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw EngineError(std::string("cannot read ") + what + " " + path.string());
  return in;
}

}  // namespace

StopWords StopWords::load(const std::filesystem::path& path) {
  auto in = open(path, "stop-word list");
  std::unordered_set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    auto w = trim(line);
    if (w.empty() || w[0] == '#') continue;
    words.insert(text::ascii_lower(w));
  }
  return StopWords(std::move(words));
}

Lexicon Lexicon::load(const std::filesystem::path& path) {
  auto in = open(path, "lexicon");
  Lexicon lex;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty() || trim(line)[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw InvalidArgument("lexicon line " + std::to_string(line_no) + ": expected word<TAB>synonyms");
    }
    std::vector<std::string> lemmas;
    std::string_view rest(line);
    rest.remove_prefix(tab + 1);
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      auto lemma = trim(rest.substr(0, comma));
      if (!lemma.empty()) lemmas.push_back(std::move(lemma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    lex.add(trim(std::string_view(line).substr(0, tab)), std::move(lemmas));
  }
  return lex;
}

void Lexicon::add(std::string word, std::vector<std::string> lemmas) {
  auto& slot = entries_[text::ascii_lower(word)];
  for (auto& l : lemmas) slot.push_back(std::move(l));
}

const std::vector<std::string>& Lexicon::synonyms(std::string_view lowered) const {
  static const std::vector<std::string> kNone;
  const auto it = entries_.find(std::string(lowered));
  return it == entries_.end() ? kNone : it->second;
}

FrequencyDictionary FrequencyDictionary::load(const std::filesystem::path& path) {
  auto in = open(path, "frequency dictionary");
  FrequencyDictionary dict;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto space = t.find(' ');
    std::uint64_t count = 0;
    if (space == std::string::npos ||
        std::from_chars(t.data() + space + 1, t.data() + t.size(), count).ec != std::errc{}) {
      throw InvalidArgument("frequency dictionary line " + std::to_string(line_no) + ": expected 'word count'");
    }
    dict.add(text::ascii_lower(t.substr(0, space)), count);
  }
  return dict;
}

void FrequencyDictionary::add(std::string word, std::uint64_t count) {
  if (word.empty() || count == 0) return;
  total_ += count;
  if (const auto it = index_.find(word); it != index_.end()) {
    counts_[it->second] += count;
    return;
  }
  max_len_ = std::max(max_len_, word.size());
  index_.emplace(word, words_.size());
  words_.push_back(std::move(word));
  counts_.push_back(count);
}

std::uint64_t FrequencyDictionary::count(std::string_view word) const {
  const auto it = index_.find(std::string(word));
  return it == index_.end() ? 0 : counts_[it->second];
}

}  // namespace scorelens::perturb
