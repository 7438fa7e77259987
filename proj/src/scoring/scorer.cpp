#include "scorelens/scoring/scorer.hpp"

#include "scorelens/error.hpp"
#include "scorelens/text/tokenizer.hpp"

namespace scorelens::scoring {

Scorer::Scorer(std::vector<ModelConfig> models, ExternalOptions external) {
  for (auto& c : models) {
    c.validate();
    if (entries_.contains(c.model_id)) throw InvalidArgument("duplicate model id '" + c.model_id + "'");
    Entry e;
    if (c.kind == ModelKind::reference) {
      e.reference = std::make_unique<ReferenceModel>(c);
    } else {
      e.external = std::make_unique<ExternalScorer>(c.endpoint, external);
    }
    e.config = c;
    order_.push_back(c.model_id);
    entries_.emplace(c.model_id, std::move(e));
  }
}

std::vector<ModelConfig> Scorer::models() const {
  std::vector<ModelConfig> out;
  for (const auto& id : order_) out.push_back(entries_.find(id)->second.config);
  return out;
}

bool Scorer::has_model(std::string_view model_id) const { return entries_.find(model_id) != entries_.end(); }

const Scorer::Entry& Scorer::entry(std::string_view model_id) const {
  const auto it = entries_.find(model_id);
  if (it == entries_.end()) throw NotFound("model not found: " + std::string(model_id));
  return it->second;
}

const ModelConfig& Scorer::config(std::string_view model_id) const { return entry(model_id).config; }

ScoreResult Scorer::score_pair(std::string_view model_id, std::string_view source, std::string_view summary,
                               bool want_attention) const {
  const auto& e = entry(model_id);
  if (e.external) {
    return e.external->score(ScoreRequest{e.config.model_id, std::string(source), std::string(summary), want_attention});
  }
  const auto input = build_model_input(source, summary, e.config, e.config.tokenizer);
  auto out = e.reference->forward(input, want_attention);
  ScoreResult r;
  r.model_id = e.config.model_id;
  r.score = out.score;
  r.truncated = input.truncated;
  r.tokens = token_infos(input);
  if (out.attention) r.attention = std::make_shared<const attention::AttentionTensor>(std::move(*out.attention));
  return r;
}

std::vector<text::TextSpan> Scorer::summary_token_spans(std::string_view model_id, std::string_view source,
                                                        std::string_view summary) const {
  const auto& e = entry(model_id);
  if (e.reference) return text::subword_tokenize(summary, e.config.tokenizer);
  const auto r = score_pair(model_id, source, summary, false);
  std::vector<text::TextSpan> out;
  for (const auto& t : r.tokens) {
    if (t.segment != Segment::summary) continue;
    if (t.start >= t.end || t.end > summary.size()) throw SchemaError("tokens", "invalid summary token offsets");
    out.push_back(text::make_span(summary, t.start, t.end, text::SpanKind::subword));
  }
  return out;
}

std::string Scorer::mask_marker(std::string_view model_id) const {
  const auto& e = entry(model_id);
  if (e.config.mask_token) return *e.config.mask_token;
  if (e.reference) {
    if (auto m = text::TokenizerRegistry::global().get(e.config.tokenizer)->mask_token()) return *m;
  }
  return "[MASK]";
}

}  // namespace scorelens::scoring
