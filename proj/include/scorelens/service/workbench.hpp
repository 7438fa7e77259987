#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "json.hpp"
#include "scorelens/attention/attention_tensor.hpp"
#include "scorelens/perturb/perturbation.hpp"
#include "scorelens/provenance/assignment.hpp"
#include "scorelens/provenance/run_log.hpp"
#include "scorelens/provenance/scatter.hpp"
#include "scorelens/provenance/training_corpus.hpp"
#include "scorelens/scoring/scorer.hpp"
#include "scorelens/service/attention_cache.hpp"
#include "scorelens/service/config.hpp"
#include "scorelens/service/job_queue.hpp"

namespace scorelens::service {

struct WorkbenchOptions {
  std::size_t workers = 4;  // per-request scoring fan-out
  std::size_t job_workers = 2;
  std::size_t attention_cache = 8;
};

struct NewSlot {
  std::optional<std::string> slot_id;  // keep an existing slot's history
  std::string text;
  provenance::SlotOptions options;
};

struct JobRef {
  std::string slot_id;
  std::string model_id;
  perturb::Method method;
  std::string job_id;
};

struct ScoreRun {
  provenance::RunRecord record;
  std::vector<JobRef> jobs;  // perturbations queued for slots that opted in
};

nlohmann::json to_json(const ScoreRun& run);

/// Maps an exception onto the service's {"error", "detail"} body and the
/// matching HTTP status.
struct ErrorBody {
  int status = 500;
  nlohmann::json body;
};
ErrorBody describe_error(std::exception_ptr error);

/// The workbench backend: model registry, perturbation engine, provenance
/// log, training corpus, assignment store, job queue and attention cache.
class Workbench {
 public:
  Workbench(std::shared_ptr<const scoring::Scorer> scorer,
            std::shared_ptr<const perturb::PerturbationResources> resources,
            std::shared_ptr<const provenance::TrainingCorpus> corpus, std::shared_ptr<provenance::RunLog> log,
            WorkbenchOptions options = {});

  /// Loads everything named by the config. `models` overrides config.models.
  static std::unique_ptr<Workbench> from_config(const ServiceConfig& config,
                                                const std::optional<std::filesystem::path>& models = std::nullopt);

  const scoring::Scorer& scorer() const { return *scorer_; }
  const perturb::PerturbationEngine& perturbation() const { return *engine_; }
  const provenance::TrainingCorpus& corpus() const { return *corpus_; }
  const provenance::RunLog& log() const { return *log_; }
  const AttentionCache& attention_cache() const { return cache_; }

  /// Creates an assignment, or replaces one when `id` names an existing
  /// assignment. Throws InvalidArgument "summaries must be non-empty".
  provenance::Assignment put_assignment(std::string source, std::vector<NewSlot> slots,
                                        std::optional<std::string> id = std::nullopt);
  provenance::Assignment assignment(const std::string& id) const;  // NotFound

  /// Scores every slot with every model (all models when empty), records one
  /// run and queues the perturbations each slot opted into.
  ScoreRun score(const std::string& assignment_id, std::vector<std::string> model_ids);

  std::string submit_perturbation(const std::string& assignment_id, const std::string& slot_id,
                                  const std::string& model_id, perturb::Method method);
  perturb::PerturbationReport perturb_now(const std::string& assignment_id, const std::string& slot_id,
                                          const std::string& model_id, perturb::Method method) const;
  std::optional<JobSnapshot> job(const std::string& id) const { return jobs_->get(id); }
  std::optional<JobSnapshot> wait_job(const std::string& id) const { return jobs_->wait(id); }

  /// Scored pair with attention, from the LRU cache when possible.
  AttentionCache::Value attention(const std::string& assignment_id, const std::string& slot_id,
                                  const std::string& model_id);
  nlohmann::json attention_slice(const std::string& assignment_id, const std::string& slot_id,
                                 const std::string& model_id, std::size_t token,
                                 const attention::SliceMode& mode);

  std::vector<provenance::HistoryRow> history(const std::string& slot_id) const { return log_->get_history(slot_id); }
  provenance::ScatterPayload scatter(const std::string& x_model, const std::string& y_model) const;

  /// Registers the example as an assignment (replacing an earlier load).
  provenance::Assignment load_example(const std::string& example_id);

 private:
  std::string new_id(const char* prefix);

  std::shared_ptr<const scoring::Scorer> scorer_;
  std::shared_ptr<const perturb::PerturbationResources> resources_;
  std::shared_ptr<const provenance::TrainingCorpus> corpus_;
  std::shared_ptr<provenance::RunLog> log_;
  WorkbenchOptions options_;
  std::unique_ptr<perturb::PerturbationEngine> engine_;
  AttentionCache cache_;

  mutable std::shared_mutex store_mutex_;
  std::map<std::string, provenance::Assignment> assignments_;
  std::uint64_t id_counter_ = 0;
  std::uint64_t id_salt_ = 0;

  std::unique_ptr<JobQueue> jobs_;  // last: drains before the rest is torn down
};

/// Per-token metadata rows: index, offsets, segment, global flag, surface.
nlohmann::json token_rows(const scoring::ScoreResult& scored);

/// Attention slice response for one query token of a scored pair.
nlohmann::json slice_payload(const scoring::ScoreResult& scored, std::size_t token, const attention::SliceMode& mode);

}  // namespace scorelens::service
