#include "scorelens/service/workbench.hpp"

#include <atomic>
#include <cstdio>
#include <mutex>
#include <random>
#include <thread>

#include "scorelens/attention/attention_wire.hpp"
#include "scorelens/error.hpp"
#include "scorelens/provenance/hashing.hpp"

namespace scorelens::service {

namespace {

nlohmann::json error_json(const std::string& message, nlohmann::json detail = nlohmann::json::object()) {
  return {{"error", message}, {"detail", std::move(detail)}};
}

}  // namespace

ErrorBody describe_error(std::exception_ptr error) {
  try {
    std::rethrow_exception(error);
  } catch (const perturb::PerturbationError& e) {
    auto inner = e.cause() ? describe_error(e.cause()) : ErrorBody{500, error_json(e.what())};
    inner.body["detail"]["variant_index"] = e.variant_index();
    inner.body["error"] = e.what();
    return inner;
  } catch (const SchemaError& e) {
    return {400, error_json(e.what(), {{"field", e.field()}})};
  } catch (const InvalidArgument& e) {
    return {400, error_json(e.what())};
  } catch (const NotFound& e) {
    return {404, error_json(e.what())};
  } catch (const ExternalError& e) {
    return {502, error_json(e.what(), {{"endpoint", e.endpoint()}})};
  } catch (const EngineError& e) {
    return {500, error_json(e.what())};
  } catch (const std::exception& e) {
    return {500, error_json(e.what())};
  } catch (...) {
    return {500, error_json("unknown error")};
  }
}

nlohmann::json to_json(const ScoreRun& run) {
  auto j = provenance::to_json(run.record);
  nlohmann::json jobs = nlohmann::json::array();
  for (const auto& r : run.jobs) {
    jobs.push_back({{"slot_id", r.slot_id},
                    {"model_id", r.model_id},
                    {"method", perturb::to_string(r.method)},
                    {"job_id", r.job_id}});
  }
  j["jobs"] = std::move(jobs);
  return j;
}

nlohmann::json token_rows(const scoring::ScoreResult& scored) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < scored.tokens.size(); ++i) {
    auto row = scoring::token_to_json(scored.tokens[i]);
    row["index"] = i;
    row["surface"] = scored.tokens[i].surface;
    rows.push_back(std::move(row));
  }
  return rows;
}

Workbench::Workbench(std::shared_ptr<const scoring::Scorer> scorer,
                     std::shared_ptr<const perturb::PerturbationResources> resources,
                     std::shared_ptr<const provenance::TrainingCorpus> corpus,
                     std::shared_ptr<provenance::RunLog> log, WorkbenchOptions options)
    : scorer_(std::move(scorer)),
      resources_(std::move(resources)),
      corpus_(std::move(corpus)),
      log_(std::move(log)),
      options_(options),
      cache_(options.attention_cache) {
  if (!scorer_ || !resources_ || !log_) throw InvalidArgument("workbench needs a scorer, resources and a run log");
  if (!corpus_) corpus_ = std::make_shared<const provenance::TrainingCorpus>();
  engine_ = std::make_unique<perturb::PerturbationEngine>(*scorer_, resources_, options_.workers);
  id_salt_ = (static_cast<std::uint64_t>(std::random_device{}()) << 32) ^ std::random_device{}();
  jobs_ = std::make_unique<JobQueue>(options_.job_workers, [](std::exception_ptr e) { return describe_error(e).body; });
}

std::unique_ptr<Workbench> Workbench::from_config(const ServiceConfig& config,
                                                  const std::optional<std::filesystem::path>& models) {
  auto effective = config;
  if (models) effective.models = *models;
  effective.validate();

  scoring::ExternalOptions external;
  external.timeout = std::chrono::milliseconds(static_cast<long long>(effective.external_timeout_s * 1000.0));
  external.max_connections = static_cast<std::ptrdiff_t>(effective.max_connections);
  auto scorer = std::make_shared<const scoring::Scorer>(effective.model_configs(), external);

  auto resources = perturb::PerturbationResources::load(
      {effective.stopwords, effective.lexicon, effective.dictionary, effective.abbreviations});

  auto corpus = std::make_shared<provenance::TrainingCorpus>();
  if (effective.training_corpus) corpus->ingest(*effective.training_corpus);

  auto log = std::make_shared<provenance::RunLog>(effective.event_log);
  return std::make_unique<Workbench>(std::move(scorer), std::move(resources), std::move(corpus), std::move(log),
                                     WorkbenchOptions{effective.workers, effective.job_workers,
                                                      effective.attention_cache});
}

std::string Workbench::new_id(const char* prefix) {
  std::uint64_t x = id_salt_ + 0x9e3779b97f4a7c15ULL * ++id_counter_;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  x ^= x >> 31;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%s-%012llx", prefix, static_cast<unsigned long long>(x & 0xffffffffffffULL));
  return buf;
}

provenance::Assignment Workbench::put_assignment(std::string source, std::vector<NewSlot> slots,
                                                 std::optional<std::string> id) {
  if (slots.empty()) throw InvalidArgument("summaries must be non-empty");
  std::unique_lock lock(store_mutex_);
  provenance::Assignment a;
  a.id = id && !id->empty() ? *id : new_id("asg");
  a.source = std::move(source);
  std::map<std::string, std::map<std::string, double>> old_cache;
  std::map<std::string, std::string> old_text;
  if (const auto it = assignments_.find(a.id); it != assignments_.end()) {
    for (const auto& s : it->second.slots) {
      old_cache[s.slot_id] = s.cached_scores;
      old_text[s.slot_id] = s.text;
    }
  }
  const bool same_source = assignments_.contains(a.id) && assignments_.at(a.id).source == a.source;
  for (auto& ns : slots) {
    provenance::Slot s;
    s.slot_id = ns.slot_id && !ns.slot_id->empty() ? *ns.slot_id : new_id("slot");
    for (const auto& existing : a.slots) {
      if (existing.slot_id == s.slot_id) throw InvalidArgument("duplicate slot id " + s.slot_id);
    }
    s.text = std::move(ns.text);
    s.options = ns.options;
    if (same_source && old_text.contains(s.slot_id) && old_text[s.slot_id] == s.text) {
      s.cached_scores = old_cache[s.slot_id];
    }
    a.slots.push_back(std::move(s));
  }
  assignments_[a.id] = a;
  return a;
}

provenance::Assignment Workbench::assignment(const std::string& id) const {
  std::shared_lock lock(store_mutex_);
  const auto it = assignments_.find(id);
  if (it == assignments_.end()) throw NotFound("assignment not found: " + id);
  return it->second;
}

ScoreRun Workbench::score(const std::string& assignment_id, std::vector<std::string> model_ids) {
  const auto snapshot = assignment(assignment_id);
  if (model_ids.empty()) {
    for (const auto& m : scorer_->models()) model_ids.push_back(m.model_id);
  }
  for (const auto& m : model_ids) scorer_->config(m);

  struct Pair {
    const provenance::Slot* slot;
    std::string model_id;
    double score = 0.0;
  };
  std::vector<Pair> pairs;
  for (const auto& s : snapshot.slots)
    for (const auto& m : model_ids) pairs.push_back({&s, m});

  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::map<std::size_t, std::exception_ptr> errors;
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < pairs.size();) {
      try {
        pairs[i].score = scorer_->score_pair(pairs[i].model_id, snapshot.source, pairs[i].slot->text, false).score;
      } catch (...) {
        std::lock_guard lock(error_mutex);
        errors.emplace(i, std::current_exception());
      }
    }
  };
  {
    const std::size_t threads = std::min(options_.workers, pairs.size());
    std::vector<std::jthread> pool;
    for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(work);
    work();
  }
  if (!errors.empty()) std::rethrow_exception(errors.begin()->second);

  std::vector<provenance::SlotScore> scores;
  for (const auto& p : pairs) scores.push_back({p.slot->slot_id, p.model_id, p.score});
  ScoreRun run;
  run.record = log_->record_run(snapshot, scores);

  {
    std::unique_lock lock(store_mutex_);
    if (auto it = assignments_.find(assignment_id); it != assignments_.end() && it->second.source == snapshot.source) {
      for (auto& s : it->second.slots) {
        for (const auto& p : pairs) {
          if (p.slot->slot_id == s.slot_id && p.slot->text == s.text) s.cached_scores[p.model_id] = p.score;
        }
      }
    }
  }

  for (const auto& s : snapshot.slots) {
    std::vector<perturb::Method> methods;
    if (s.options.words) methods.push_back(perturb::Method::words);
    if (s.options.sentences) methods.push_back(perturb::Method::sentences);
    if (s.options.tokens) methods.push_back(perturb::Method::tokens);
    if (s.options.grammar) methods.push_back(perturb::Method::grammar);
    for (const auto& m : model_ids) {
      for (const auto method : methods) {
        run.jobs.push_back({s.slot_id, m, method, submit_perturbation(assignment_id, s.slot_id, m, method)});
      }
    }
  }
  return run;
}

std::string Workbench::submit_perturbation(const std::string& assignment_id, const std::string& slot_id,
                                           const std::string& model_id, perturb::Method method) {
  const auto a = assignment(assignment_id);
  const auto text = a.slot(slot_id).text;
  scorer_->config(model_id);
  return jobs_->submit([this, source = a.source, text, model_id, method] {
    return perturb::to_json(engine_->run(source, text, model_id, method));
  });
}

perturb::PerturbationReport Workbench::perturb_now(const std::string& assignment_id, const std::string& slot_id,
                                                   const std::string& model_id, perturb::Method method) const {
  const auto a = assignment(assignment_id);
  return engine_->run(a.source, a.slot(slot_id).text, model_id, method);
}

AttentionCache::Value Workbench::attention(const std::string& assignment_id, const std::string& slot_id,
                                           const std::string& model_id) {
  const auto a = assignment(assignment_id);
  const auto& text = a.slot(slot_id).text;
  scorer_->config(model_id);
  const auto key = AttentionCache::key(model_id, provenance::pair_hash(a.source, text));
  return cache_.get_or_compute(key, [&] {
    auto r = scorer_->score_pair(model_id, a.source, text, true);
    if (!r.attention) throw EngineError("model " + model_id + " returned no attention");
    return std::make_shared<const scoring::ScoreResult>(std::move(r));
  });
}

nlohmann::json Workbench::attention_slice(const std::string& assignment_id, const std::string& slot_id,
                                          const std::string& model_id, std::size_t token,
                                          const attention::SliceMode& mode) {
  return slice_payload(*attention(assignment_id, slot_id, model_id), token, mode);
}

nlohmann::json slice_payload(const scoring::ScoreResult& scored, std::size_t token, const attention::SliceMode& mode) {
  if (!scored.attention) throw EngineError("model " + scored.model_id + " returned no attention");
  const auto& t = *scored.attention;
  if (token >= t.n()) {
    throw InvalidArgument("token " + std::to_string(token) + " out of range [0, " + std::to_string(t.n()) + ")");
  }
  auto j = attention::slice_to_json(attention::slice_attention(t, token, mode), mode, token_rows(scored));
  j["model_id"] = scored.model_id;
  j["n"] = t.n();
  j["layers"] = t.layers();
  j["heads"] = t.heads();
  j["window"] = t.window();
  j["global_indices"] = t.global_indices();
  return j;
}

provenance::ScatterPayload Workbench::scatter(const std::string& x_model, const std::string& y_model) const {
  return provenance::scatter_payload(*corpus_, *log_, x_model, scorer_->config(x_model).score_dimension, y_model,
                                     scorer_->config(y_model).score_dimension);
}

provenance::Assignment Workbench::load_example(const std::string& example_id) {
  auto a = provenance::load_example(*corpus_, *log_, example_id);
  std::unique_lock lock(store_mutex_);
  assignments_[a.id] = a;
  return a;
}

}  // namespace scorelens::service
