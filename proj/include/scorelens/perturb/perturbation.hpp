#pragma once

#include <cstddef>
#include <exception>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "scorelens/error.hpp"
#include "scorelens/perturb/grammar.hpp"
#include "scorelens/perturb/resources.hpp"
#include "scorelens/perturb/spelling.hpp"
#include "scorelens/scoring/scorer.hpp"
#include "scorelens/text/segmentation.hpp"

namespace scorelens::perturb {

enum class Method { words, sentences, tokens, grammar };

std::string_view to_string(Method method);
Method method_from_string(std::string_view name);  // InvalidArgument

struct Variant {
  Method method = Method::words;
  std::optional<text::TextSpan> span;  // into the original summary; absent for grammar
  std::string replacement;
  std::string variant_text;
  double score = 0.0;
  double delta = 0.0;  // score - baseline
  std::string label;   // grammar mode name, empty otherwise
};

struct PerturbationReport {
  std::string model_id;
  Method method = Method::words;
  double baseline_score = 0.0;
  std::vector<Variant> variants;
};

/// Read-only inputs shared by every perturbation.
struct PerturbationResources {
  std::shared_ptr<const StopWords> stop_words;
  std::shared_ptr<const Lexicon> lexicon;
  std::shared_ptr<const FrequencyDictionary> dictionary;
  std::shared_ptr<const SpellIndex> spell_index;
  std::shared_ptr<const text::AbbreviationList> abbreviations;

  struct Paths {
    std::filesystem::path stop_words;
    std::filesystem::path lexicon;
    std::filesystem::path dictionary;
    std::optional<std::filesystem::path> abbreviations;
  };
  static std::shared_ptr<const PerturbationResources> load(const Paths& paths);
};

/// Unscored variants. `token_spans` are the target model's subword spans over
/// the summary and `mask_marker` its placeholder for masked spans.
std::vector<Variant> generate_variants(std::string_view summary, Method method, const PerturbationResources& resources,
                                       std::string_view mask_marker, const std::vector<text::TextSpan>& token_spans);

/// Same, using a registered tokenizer for the token spans and mask marker.
std::vector<Variant> generate_variants(std::string_view summary, Method method, const PerturbationResources& resources,
                                       std::string_view tokenizer_id);

/// Entry with the largest magnitude, sign kept; the earliest wins ties.
double word_underline_value(std::span<const double> deltas);

/// A variant could not be scored. `cause()` is the original scorer error.
class PerturbationError : public EngineError {
 public:
  PerturbationError(std::size_t variant_index, std::exception_ptr cause, const std::string& what)
      : EngineError("variant " + std::to_string(variant_index) + ": " + what),
        index_(variant_index),
        cause_(std::move(cause)) {}

  std::size_t variant_index() const noexcept { return index_; }
  std::exception_ptr cause() const noexcept { return cause_; }

 private:
  std::size_t index_;
  std::exception_ptr cause_;
};

/// Scores a baseline and every variant against the unchanged source. Variant
/// scoring fans out over at most `workers` threads; the report keeps document
/// order. Either every variant is scored or an error is thrown.
class PerturbationEngine {
 public:
  PerturbationEngine(const scoring::Scorer& scorer, std::shared_ptr<const PerturbationResources> resources,
                     std::size_t workers = 4);

  PerturbationReport run(std::string_view source, std::string_view summary, std::string_view model_id,
                         Method method) const;

  /// Scores already generated variants in place.
  void score_variants(std::string_view source, std::string_view model_id, double baseline,
                      std::vector<Variant>& variants) const;

  std::vector<Variant> variants_for(std::string_view source, std::string_view summary, std::string_view model_id,
                                    Method method) const;

  const PerturbationResources& resources() const { return *resources_; }

 private:
  const scoring::Scorer& scorer_;
  std::shared_ptr<const PerturbationResources> resources_;
  std::size_t workers_;
};

nlohmann::json span_to_json(const text::TextSpan& span);
nlohmann::json to_json(const Variant& variant);

/// Includes a "word_underlines" array for the words method: one entry per
/// replaced word span with word_underline_value over its variants.
nlohmann::json to_json(const PerturbationReport& report);

}  // namespace scorelens::perturb
