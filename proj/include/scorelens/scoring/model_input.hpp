#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "scorelens/scoring/model_config.hpp"
#include "scorelens/text/segmentation.hpp"

namespace scorelens::scoring {

enum class Segment { begin_marker, source, separator, summary, end_marker };

std::string to_string(Segment segment);
Segment segment_from_string(std::string_view s);  // throws InvalidArgument

inline constexpr std::string_view kBeginSurface = "[CLS]";
inline constexpr std::string_view kSepSurface = "[SEP]";
inline constexpr std::string_view kEndSurface = "[END]";

/// Joint source/summary sequence: [BEGIN] source [SEP] summary [END].
///
/// `spans` index into `display_text`, which is
/// "[CLS] " + source + " [SEP] " + summary + " [END]". The source is kept
/// whole in the display text even when its token tail was truncated.
struct ModelInput {
  std::vector<std::int32_t> tokens;
  std::vector<text::TextSpan> spans;
  std::vector<Segment> segments;
  std::vector<bool> global_flags;
  std::string display_text;
  std::size_t source_offset = 0;   // byte offset of the source in display_text
  std::size_t summary_offset = 0;  // byte offset of the summary in display_text
  bool truncated = false;

  std::size_t size() const { return tokens.size(); }
};

/// Throws InvalidArgument("summary too long for model") when the summary
/// cannot fit beside the three markers. Source tokens are dropped from the
/// tail to fit max_len.
ModelInput build_model_input(std::string_view source, std::string_view summary, const ModelConfig& config,
                             std::string_view tokenizer_id);

/// One position of a scored sequence as exchanged with clients and external
/// scorers. Offsets are relative to the segment's own text (source or
/// summary); marker tokens use [0, 0).
struct TokenInfo {
  std::size_t start = 0;
  std::size_t end = 0;
  Segment segment = Segment::source;
  bool global = false;
  std::string surface;

  friend bool operator==(const TokenInfo&, const TokenInfo&) = default;
};

std::vector<TokenInfo> token_infos(const ModelInput& input);

}  // namespace scorelens::scoring
