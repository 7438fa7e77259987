#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "scorelens/provenance/run_log.hpp"
#include "scorelens/provenance/training_corpus.hpp"

namespace scorelens::provenance {

inline constexpr std::size_t kHistogramBins = 20;

struct TrainingPoint {
  std::string example_id;
  double x = 0.0;
  double y = 0.0;
};

struct RunPoint {
  std::string slot_id;
  std::uint64_t run_number = 0;
  double x = 0.0;
  double y = 0.0;
  std::string summary_text;
};

struct RunArrow {
  std::string slot_id;
  RunPoint from;
  RunPoint to;
};

struct HistogramBin {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 0;
};

struct ScatterPayload {
  std::string x_model;
  std::string y_model;
  std::vector<TrainingPoint> training_points;
  std::vector<RunPoint> current_points;  // latest run per slot
  std::vector<RunPoint> run_points;      // every run that scored both models, by slot then run
  std::vector<RunArrow> run_arrows;      // consecutive runs of one slot, old -> new
  std::vector<HistogramBin> x_hist;
  std::vector<HistogramBin> y_hist;
};

/// Equal-width bins over [min, max] of `range_values`, counting only
/// `counted`. Bin i spans [min + i*(max-min)/bins, min + (i+1)*(max-min)/bins),
/// the last bin is closed. A zero-width range is widened by 0.5 each side.
/// Empty range_values gives no bins.
std::vector<HistogramBin> histogram(const std::vector<double>& counted, const std::vector<double>& range_values,
                                    std::size_t bins = kHistogramBins);

/// Training examples are placed by the score dimension of each model
/// ("content" or "wording"); runs by the scores the two models produced.
ScatterPayload scatter_payload(const TrainingCorpus& corpus, const RunLog& log, std::string_view x_model,
                               std::string_view x_dimension, std::string_view y_model, std::string_view y_dimension);

nlohmann::json to_json(const ScatterPayload& payload);

}  // namespace scorelens::provenance
