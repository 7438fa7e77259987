#include "scorelens/scoring/model_input.hpp"

#include "scorelens/error.hpp"
#include "scorelens/text/tokenizer.hpp"

namespace scorelens::scoring {

std::string to_string(Segment s) {
  switch (s) {
    case Segment::begin_marker: return "begin";
    case Segment::source: return "source";
    case Segment::separator: return "separator";
    case Segment::summary: return "summary";
    case Segment::end_marker: return "end";
  }
  return "source";
}

Segment segment_from_string(std::string_view s) {
  if (s == "begin") return Segment::begin_marker;
  if (s == "source") return Segment::source;
  if (s == "separator") return Segment::separator;
  if (s == "summary") return Segment::summary;
  if (s == "end") return Segment::end_marker;
  throw InvalidArgument("unknown segment '" + std::string(s) + "'");
}

ModelInput build_model_input(std::string_view source, std::string_view summary, const ModelConfig& config,
                             std::string_view tokenizer_id) {
  const auto tokenizer = text::TokenizerRegistry::global().get(tokenizer_id);
  auto source_tokens = tokenizer->tokenize(source);
  auto summary_tokens = tokenizer->tokenize(summary);

  if (summary_tokens.size() + 3 > config.max_len) {
    throw InvalidArgument("summary too long for model '" + config.model_id + "' (" +
                          std::to_string(summary_tokens.size()) + " tokens, limit " +
                          std::to_string(config.max_len - 3) + ")");
  }

  ModelInput in;
  const std::size_t source_budget = config.max_len - 3 - summary_tokens.size();
  if (source_tokens.size() > source_budget) {
    source_tokens.resize(source_budget);
    in.truncated = true;
  }

  in.display_text.reserve(source.size() + summary.size() + 24);
  in.display_text += kBeginSurface;
  in.display_text += ' ';
  in.source_offset = in.display_text.size();
  in.display_text += source;
  in.display_text += ' ';
  const std::size_t sep_offset = in.display_text.size();
  in.display_text += kSepSurface;
  in.display_text += ' ';
  in.summary_offset = in.display_text.size();
  in.display_text += summary;
  in.display_text += ' ';
  const std::size_t end_offset = in.display_text.size();
  in.display_text += kEndSurface;

  const bool summary_global = config.global_mode == GlobalMode::summary_global;
  const std::size_t n = source_tokens.size() + summary_tokens.size() + 3;
  in.tokens.reserve(n);
  in.spans.reserve(n);
  in.segments.reserve(n);
  in.global_flags.reserve(n);

  auto push = [&](std::int32_t id, std::size_t start, std::size_t end, Segment seg, bool global) {
    in.tokens.push_back(id);
    in.spans.push_back(text::make_span(in.display_text, start, end, text::SpanKind::subword));
    in.segments.push_back(seg);
    in.global_flags.push_back(global);
  };

  push(text::HashingTokenizer::kBeginId, 0, kBeginSurface.size(), Segment::begin_marker, true);
  for (const auto& t : source_tokens) {
    push(t.id, in.source_offset + t.span.start, in.source_offset + t.span.end, Segment::source, false);
  }
  push(text::HashingTokenizer::kSepId, sep_offset, sep_offset + kSepSurface.size(), Segment::separator, false);
  for (const auto& t : summary_tokens) {
    push(t.id, in.summary_offset + t.span.start, in.summary_offset + t.span.end, Segment::summary, summary_global);
  }
  push(text::HashingTokenizer::kEndId, end_offset, end_offset + kEndSurface.size(), Segment::end_marker, false);
  return in;
}

std::vector<TokenInfo> token_infos(const ModelInput& input) {
  std::vector<TokenInfo> out;
  out.reserve(input.size());
  for (std::size_t i = 0; i < input.size(); ++i) {
    TokenInfo t;
    t.segment = input.segments[i];
    t.global = input.global_flags[i];
    t.surface = input.spans[i].surface;
    if (t.segment == Segment::source) {
      t.start = input.spans[i].start - input.source_offset;
      t.end = input.spans[i].end - input.source_offset;
    } else if (t.segment == Segment::summary) {
      t.start = input.spans[i].start - input.summary_offset;
      t.end = input.spans[i].end - input.summary_offset;
    }
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace scorelens::scoring
