#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "scorelens/scoring/external_scorer.hpp"
#include "scorelens/scoring/model_config.hpp"
#include "scorelens/scoring/reference_model.hpp"
#include "scorelens/scoring/wire.hpp"
#include "scorelens/text/segmentation.hpp"

namespace scorelens::scoring {

/// Registry of scoring models. Immutable after construction, so every method
/// may be called concurrently.
class Scorer {
 public:
  explicit Scorer(std::vector<ModelConfig> models, ExternalOptions external = {});

  std::vector<ModelConfig> models() const;
  bool has_model(std::string_view model_id) const;
  const ModelConfig& config(std::string_view model_id) const;  // NotFound "model not found"

  ScoreResult score_pair(std::string_view model_id, std::string_view source, std::string_view summary,
                         bool want_attention) const;

  /// The model's subword spans over the summary alone (offsets into summary).
  std::vector<text::TextSpan> summary_token_spans(std::string_view model_id, std::string_view source,
                                                  std::string_view summary) const;

  /// Placeholder substituted for masked spans for this model.
  std::string mask_marker(std::string_view model_id) const;

 private:
  struct Entry {
    ModelConfig config;
    std::unique_ptr<ReferenceModel> reference;
    std::unique_ptr<ExternalScorer> external;
  };

  const Entry& entry(std::string_view model_id) const;

  std::vector<std::string> order_;
  std::map<std::string, Entry, std::less<>> entries_;
};

}  // namespace scorelens::scoring
