#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "scorelens/provenance/assignment.hpp"

namespace scorelens::provenance {

inline constexpr std::size_t kRubricCriteria = 6;
using Rubric = std::array<double, kRubricCriteria>;

/// Criterion names in rubric order; the first four form the content group.
inline constexpr std::array<std::string_view, kRubricCriteria> kRubricNames = {
    "main_idea", "details", "cohesion", "objective_language", "paraphrasing", "language_beyond_source"};

struct TrainingExample {
  std::string example_id;
  std::string source;
  std::string summary;
  std::optional<Rubric> rubric;  // each value in [1, 4]
  double content = 0.0;
  double wording = 0.0;

  friend bool operator==(const TrainingExample&, const TrainingExample&) = default;
};

nlohmann::json to_json(const TrainingExample& example);

/// Throws SchemaError naming the offending field.
TrainingExample training_example_from_json(const nlohmann::json& j);

struct RejectedLine {
  std::size_t line = 0;  // 1-based
  std::string reason;
};

struct IngestReport {
  std::size_t accepted = 0;
  std::vector<RejectedLine> rejected;
};

/// Expert-scored examples indexed by id, kept in file order.
class TrainingCorpus {
 public:
  /// One JSON object per line; blank lines are skipped. Malformed lines and
  /// duplicate ids are reported and skipped. Throws EngineError if the file
  /// cannot be read.
  IngestReport ingest(const std::filesystem::path& path);

  void add(TrainingExample example);  // InvalidArgument on duplicate id

  const TrainingExample& get(std::string_view example_id) const;  // NotFound
  const std::vector<TrainingExample>& examples() const { return examples_; }
  std::size_t size() const { return examples_.size(); }
  bool empty() const { return examples_.empty(); }

  /// Value of the "content" or "wording" axis for one example.
  static double axis_value(const TrainingExample& example, std::string_view dimension);

  void write(const std::filesystem::path& path) const;
  std::vector<TrainingExample>& mutable_examples() { return examples_; }

 private:
  std::vector<TrainingExample> examples_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

/// Example id -> assignment id and slot id used when loading it into the
/// workbench.
std::string example_assignment_id(std::string_view example_id);

class RunLog;

/// Assignment holding the example's source and one summary slot, with the
/// latest persisted scores for that exact text.
Assignment load_example(const TrainingCorpus& corpus, const RunLog& log, std::string_view example_id);

}  // namespace scorelens::provenance
