#include "scorelens/text/tokenizer.hpp"

#include <mutex>

#include "scorelens/error.hpp"

namespace scorelens::text {

namespace {

std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::int32_t HashingTokenizer::piece_id(std::string_view lowered_piece, bool continuation) {
  auto h = fnv1a(continuation ? "##" : "");
  h = fnv1a(lowered_piece, h);
  return kFirstRegularId + static_cast<std::int32_t>(h % static_cast<std::uint64_t>(kVocabSize - kFirstRegularId));
}

std::vector<Token> HashingTokenizer::tokenize(std::string_view text) const {
  std::vector<Token> out;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (is_space(c)) {
      ++i;
      continue;
    }
    if (text.substr(i, kMaskSurface.size()) == kMaskSurface) {
      out.push_back({kMaskId, make_span(text, i, i + kMaskSurface.size(), SpanKind::subword)});
      i += kMaskSurface.size();
      continue;
    }
    if (!is_word_byte(c)) {
      out.push_back({piece_id(text.substr(i, 1), false), make_span(text, i, i + 1, SpanKind::subword)});
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < n && is_word_byte(static_cast<unsigned char>(text[j])) &&
           text.substr(j, kMaskSurface.size()) != kMaskSurface) {
      j += utf8_length(static_cast<unsigned char>(text[j]));
    }
    if (j > n) j = n;  // truncated multi-byte sequence at end of input
    bool continuation = false;
    std::size_t piece = i;
    while (piece < j) {
      std::size_t end = piece;
      for (std::size_t chars = 0; chars < kMaxPieceChars && end < j; ++chars) {
        end += utf8_length(static_cast<unsigned char>(text[end]));
      }
      if (end > j) end = j;
      out.push_back({piece_id(ascii_lower(text.substr(piece, end - piece)), continuation),
                     make_span(text, piece, end, SpanKind::subword)});
      continuation = true;
      piece = end;
    }
    i = j;
  }
  return out;
}

TokenizerRegistry::TokenizerRegistry() {
  tokenizers_.emplace(std::string(kReferenceTokenizerId), std::make_shared<HashingTokenizer>());
}

TokenizerRegistry& TokenizerRegistry::global() {
  static TokenizerRegistry registry;
  return registry;
}

void TokenizerRegistry::add(std::string id, std::shared_ptr<const Tokenizer> tokenizer) {
  std::unique_lock lock(mutex_);
  tokenizers_[std::move(id)] = std::move(tokenizer);
}

std::shared_ptr<const Tokenizer> TokenizerRegistry::get(std::string_view id) const {
  std::shared_lock lock(mutex_);
  const auto it = tokenizers_.find(id);
  if (it == tokenizers_.end()) throw NotFound("tokenizer not registered: " + std::string(id));
  return it->second;
}

std::vector<TextSpan> subword_tokenize(std::string_view text, std::string_view tokenizer_id) {
  const auto tokenizer = TokenizerRegistry::global().get(tokenizer_id);
  std::vector<TextSpan> spans;
  for (auto& t : tokenizer->tokenize(text)) spans.push_back(std::move(t.span));
  return spans;
}

}  // namespace scorelens::text
