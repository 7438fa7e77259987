#include "scorelens/perturb/perturbation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <mutex>
#include <thread>

#include "scorelens/text/tokenizer.hpp"

namespace scorelens::perturb {

std::string_view to_string(Method method) {
  switch (method) {
    case Method::words: return "words";
    case Method::sentences: return "sentences";
    case Method::tokens: return "tokens";
    case Method::grammar: return "grammar";
  }
  return "?";
}

Method method_from_string(std::string_view name) {
  if (name == "words") return Method::words;
  if (name == "sentences") return Method::sentences;
  if (name == "tokens") return Method::tokens;
  if (name == "grammar") return Method::grammar;
  throw InvalidArgument("unknown perturbation method '" + std::string(name) + "'");
}

std::shared_ptr<const PerturbationResources> PerturbationResources::load(const Paths& paths) {
  auto r = std::make_shared<PerturbationResources>();
  r->stop_words = std::make_shared<const StopWords>(StopWords::load(paths.stop_words));
  r->lexicon = std::make_shared<const Lexicon>(Lexicon::load(paths.lexicon));
  r->dictionary = std::make_shared<const FrequencyDictionary>(FrequencyDictionary::load(paths.dictionary));
  r->spell_index = std::make_shared<const SpellIndex>(r->dictionary);
  r->abbreviations = paths.abbreviations
                         ? std::make_shared<const text::AbbreviationList>(text::AbbreviationList::load(*paths.abbreviations))
                         : std::make_shared<const text::AbbreviationList>();
  return r;
}

namespace {

Variant replace_span(std::string_view summary, Method method, const text::TextSpan& span, std::string replacement) {
  Variant v;
  v.method = method;
  v.span = span;
  v.variant_text.reserve(summary.size() + replacement.size());
  v.variant_text.append(summary.substr(0, span.start));
  v.variant_text += replacement;
  v.variant_text.append(summary.substr(span.end));
  v.replacement = std::move(replacement);
  return v;
}

const text::AbbreviationList& abbreviations_of(const PerturbationResources& r) {
  static const text::AbbreviationList kDefault;
  return r.abbreviations ? *r.abbreviations : kDefault;
}

}  // namespace

std::vector<Variant> generate_variants(std::string_view summary, Method method, const PerturbationResources& resources,
                                       std::string_view mask_marker, const std::vector<text::TextSpan>& token_spans) {
  std::vector<Variant> out;
  switch (method) {
    case Method::words: {
      if (!resources.lexicon || resources.lexicon->empty()) throw InvalidArgument("lexicon is empty");
      for (const auto& span : text::split_words(summary, abbreviations_of(resources))) {
        if (span.kind != text::SpanKind::word) continue;
        const auto lowered = text::ascii_lower(span.surface);
        if (resources.stop_words && resources.stop_words->contains(lowered)) continue;
        for (const auto& lemma : resources.lexicon->synonyms(lowered)) {
          out.push_back(replace_span(summary, method, span, lemma));
        }
      }
      break;
    }
    case Method::sentences: {
      const auto sentences = text::split_sentences(summary, abbreviations_of(resources));
      if (sentences.empty()) throw InvalidArgument("no spans");
      for (const auto& s : sentences) out.push_back(replace_span(summary, method, s, std::string(mask_marker)));
      break;
    }
    case Method::tokens: {
      if (token_spans.empty()) throw InvalidArgument("no spans");
      for (const auto& t : token_spans) out.push_back(replace_span(summary, method, t, std::string(mask_marker)));
      break;
    }
    case Method::grammar: {
      if (!resources.spell_index) throw InvalidArgument("frequency dictionary not loaded");
      for (const auto mode : kGrammarModes) {
        Variant v;
        v.method = method;
        v.variant_text = correct(mode, summary, *resources.spell_index);
        v.replacement = v.variant_text;
        v.label = std::string(to_string(mode));
        out.push_back(std::move(v));
      }
      break;
    }
  }
  return out;
}

std::vector<Variant> generate_variants(std::string_view summary, Method method, const PerturbationResources& resources,
                                       std::string_view tokenizer_id) {
  const auto tokenizer = text::TokenizerRegistry::global().get(tokenizer_id);
  const auto marker = tokenizer->mask_token().value_or("[MASK]");
  std::vector<text::TextSpan> tokens;
  if (method == Method::tokens) tokens = text::subword_tokenize(summary, tokenizer_id);
  return generate_variants(summary, method, resources, marker, tokens);
}

double word_underline_value(std::span<const double> deltas) {
  if (deltas.empty()) throw InvalidArgument("word_underline_value needs at least one delta");
  double best = deltas[0];
  for (const double d : deltas.subspan(1)) {
    if (std::fabs(d) > std::fabs(best)) best = d;
  }
  return best;
}

PerturbationEngine::PerturbationEngine(const scoring::Scorer& scorer,
                                       std::shared_ptr<const PerturbationResources> resources, std::size_t workers)
    : scorer_(scorer), resources_(std::move(resources)), workers_(std::max<std::size_t>(1, workers)) {
  if (!resources_) throw InvalidArgument("perturbation engine needs resources");
}

std::vector<Variant> PerturbationEngine::variants_for(std::string_view source, std::string_view summary,
                                                      std::string_view model_id, Method method) const {
  std::vector<text::TextSpan> tokens;
  if (method == Method::tokens) tokens = scorer_.summary_token_spans(model_id, source, summary);
  const auto marker = (method == Method::sentences || method == Method::tokens) ? scorer_.mask_marker(model_id)
                                                                                : std::string();
  return generate_variants(summary, method, *resources_, marker, tokens);
}

void PerturbationEngine::score_variants(std::string_view source, std::string_view model_id, double baseline,
                                        std::vector<Variant>& variants) const {
  const std::size_t n = variants.size();
  if (n == 0) return;
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::mutex error_mutex;
  std::map<std::size_t, std::exception_ptr> errors;

  auto work = [&] {
    for (;;) {
      if (failed.load()) return;
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        const auto r = scorer_.score_pair(model_id, source, variants[i].variant_text, false);
        variants[i].score = r.score;
        variants[i].delta = r.score - baseline;
      } catch (...) {
        std::lock_guard lock(error_mutex);
        errors.emplace(i, std::current_exception());
        failed.store(true);
      }
    }
  };

  const std::size_t threads = std::min(workers_, n);
  if (threads == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work);
  }

  if (!errors.empty()) {
    const auto& [index, cause] = *errors.begin();
    std::string what;
    try {
      std::rethrow_exception(cause);
    } catch (const std::exception& e) {
      what = e.what();
    } catch (...) {
      what = "unknown error";
    }
    throw PerturbationError(index, cause, what);
  }
}

PerturbationReport PerturbationEngine::run(std::string_view source, std::string_view summary,
                                           std::string_view model_id, Method method) const {
  PerturbationReport report;
  report.model_id = std::string(model_id);
  report.method = method;
  report.variants = variants_for(source, summary, model_id, method);
  report.baseline_score = scorer_.score_pair(model_id, source, summary, false).score;
  score_variants(source, model_id, report.baseline_score, report.variants);
  return report;
}

nlohmann::json span_to_json(const text::TextSpan& span) {
  return {{"start", span.start}, {"end", span.end}, {"kind", text::to_string(span.kind)}, {"surface", span.surface}};
}

nlohmann::json to_json(const Variant& v) {
  nlohmann::json j = {{"method", to_string(v.method)},
                      {"span", v.span ? span_to_json(*v.span) : nlohmann::json(nullptr)},
                      {"replacement", v.replacement},
                      {"variant_text", v.variant_text},
                      {"score", v.score},
                      {"delta", v.delta}};
  if (!v.label.empty()) j["label"] = v.label;
  return j;
}

nlohmann::json to_json(const PerturbationReport& report) {
  nlohmann::json variants = nlohmann::json::array();
  for (const auto& v : report.variants) variants.push_back(to_json(v));
  nlohmann::json j = {{"model_id", report.model_id},
                      {"method", to_string(report.method)},
                      {"baseline_score", report.baseline_score},
                      {"variants", std::move(variants)}};
  if (report.method == Method::words) {
    nlohmann::json underlines = nlohmann::json::array();
    std::size_t i = 0;
    while (i < report.variants.size()) {
      const auto& span = *report.variants[i].span;
      std::vector<double> deltas;
      std::size_t j2 = i;
      while (j2 < report.variants.size() && report.variants[j2].span->start == span.start) {
        deltas.push_back(report.variants[j2].delta);
        ++j2;
      }
      underlines.push_back({{"span", span_to_json(span)}, {"value", word_underline_value(deltas)}});
      i = j2;
    }
    j["word_underlines"] = std::move(underlines);
  }
  return j;
}

}  // namespace scorelens::perturb
