#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "scorelens/text/segmentation.hpp"

namespace scorelens::text {

struct Token {
  std::int32_t id = 0;
  TextSpan span;
};

class Tokenizer {
 public:
  virtual ~Tokenizer() = default;

  virtual std::vector<Token> tokenize(std::string_view text) const = 0;

  /// Literal surface of the reserved mask token, if the vocabulary has one.
  virtual std::optional<std::string> mask_token() const { return std::nullopt; }
};

/// Dependency-free subword tokenizer. Word runs are lowercased and cut into
/// pieces of at most kMaxPieceChars code points; each piece is hashed into a
/// fixed vocabulary. Every ASCII punctuation byte is its own token and the
/// literal "[MASK]" maps to the reserved mask id.
class HashingTokenizer final : public Tokenizer {
 public:
  static constexpr std::int32_t kVocabSize = 8192;
  static constexpr std::int32_t kPadId = 0;
  static constexpr std::int32_t kBeginId = 1;
  static constexpr std::int32_t kSepId = 2;
  static constexpr std::int32_t kEndId = 3;
  static constexpr std::int32_t kMaskId = 4;
  static constexpr std::int32_t kFirstRegularId = 5;
  static constexpr std::size_t kMaxPieceChars = 6;
  static constexpr std::string_view kMaskSurface = "[MASK]";

  std::vector<Token> tokenize(std::string_view text) const override;
  std::optional<std::string> mask_token() const override { return std::string(kMaskSurface); }

  static std::int32_t piece_id(std::string_view lowered_piece, bool continuation);
};

inline constexpr std::string_view kReferenceTokenizerId = "reference";

/// Named tokenizers. The process-wide instance comes preloaded with the
/// reference hashing tokenizer; reads are concurrent.
class TokenizerRegistry {
 public:
  TokenizerRegistry();

  static TokenizerRegistry& global();

  void add(std::string id, std::shared_ptr<const Tokenizer> tokenizer);
  std::shared_ptr<const Tokenizer> get(std::string_view id) const;  // throws NotFound

 private:
  mutable std::shared_mutex mutex_;
  std::map<std::string, std::shared_ptr<const Tokenizer>, std::less<>> tokenizers_;
};

std::vector<TextSpan> subword_tokenize(std::string_view text, std::string_view tokenizer_id);

}  // namespace scorelens::text
