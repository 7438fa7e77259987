#include "scorelens/provenance/scatter.hpp"

#include <algorithm>
#include <map>
#include <optional>

namespace scorelens::provenance {

std::vector<HistogramBin> histogram(const std::vector<double>& counted, const std::vector<double>& range_values,
                                    std::size_t bins) {
  std::vector<HistogramBin> out;
  if (range_values.empty() || bins == 0) return out;
  const auto [mn, mx] = std::minmax_element(range_values.begin(), range_values.end());
  double lo = *mn, hi = *mx;
  if (hi == lo) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double width = (hi - lo) / static_cast<double>(bins);
  out.resize(bins);
  for (std::size_t i = 0; i < bins; ++i) {
    out[i].lo = lo + static_cast<double>(i) * (hi - lo) / static_cast<double>(bins);
    out[i].hi = i + 1 == bins ? hi : lo + static_cast<double>(i + 1) * (hi - lo) / static_cast<double>(bins);
  }
  for (const double v : counted) {
    if (v < lo || v > hi) continue;
    auto i = static_cast<std::size_t>((v - lo) / width);
    i = std::min(i, bins - 1);
    // floating-point division can land one bin off near an edge
    while (i > 0 && v < out[i].lo) --i;
    while (i + 1 < bins && v >= out[i + 1].lo) ++i;
    ++out[i].count;
  }
  return out;
}

ScatterPayload scatter_payload(const TrainingCorpus& corpus, const RunLog& log, std::string_view x_model,
                               std::string_view x_dimension, std::string_view y_model, std::string_view y_dimension) {
  ScatterPayload p;
  p.x_model = std::string(x_model);
  p.y_model = std::string(y_model);

  std::vector<double> xs, ys;
  for (const auto& e : corpus.examples()) {
    p.training_points.push_back(
        {e.example_id, TrainingCorpus::axis_value(e, x_dimension), TrainingCorpus::axis_value(e, y_dimension)});
    xs.push_back(p.training_points.back().x);
    ys.push_back(p.training_points.back().y);
  }

  std::map<std::string, std::vector<RunPoint>> by_slot;
  std::vector<std::string> slot_order;
  for (const auto& r : log.records()) {
    std::map<std::string, std::pair<std::optional<double>, std::optional<double>>> scores;
    std::map<std::string, std::string> texts;
    std::vector<std::string> seen;
    for (const auto& e : r.entries) {
      auto& s = scores[e.slot_id];
      if (!texts.contains(e.slot_id)) seen.push_back(e.slot_id);
      texts[e.slot_id] = e.summary_text;
      if (e.model_id == x_model) s.first = e.score;
      if (e.model_id == y_model) s.second = e.score;
    }
    for (const auto& slot : seen) {
      const auto& s = scores[slot];
      if (!s.first || !s.second) continue;
      if (!by_slot.contains(slot)) slot_order.push_back(slot);
      by_slot[slot].push_back({slot, r.run_number, *s.first, *s.second, texts[slot]});
    }
  }

  for (const auto& slot : slot_order) {
    const auto& pts = by_slot[slot];
    for (std::size_t i = 0; i < pts.size(); ++i) {
      p.run_points.push_back(pts[i]);
      if (i > 0) p.run_arrows.push_back({slot, pts[i - 1], pts[i]});
    }
    p.current_points.push_back(pts.back());
  }

  std::vector<double> x_range = xs, y_range = ys;
  for (const auto& rp : p.run_points) {
    x_range.push_back(rp.x);
    y_range.push_back(rp.y);
  }
  p.x_hist = histogram(xs, x_range);
  p.y_hist = histogram(ys, y_range);
  return p;
}

namespace {

nlohmann::json point_json(const RunPoint& rp) {
  return {{"slot_id", rp.slot_id}, {"run_number", rp.run_number}, {"x", rp.x}, {"y", rp.y},
          {"summary_text", rp.summary_text}};
}

nlohmann::json hist_json(const std::vector<HistogramBin>& bins) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& b : bins) out.push_back({{"lo", b.lo}, {"hi", b.hi}, {"count", b.count}});
  return out;
}

}  // namespace

nlohmann::json to_json(const ScatterPayload& p) {
  nlohmann::json training = nlohmann::json::array();
  for (const auto& t : p.training_points) training.push_back({{"example_id", t.example_id}, {"x", t.x}, {"y", t.y}});
  nlohmann::json current = nlohmann::json::array(), runs = nlohmann::json::array(), arrows = nlohmann::json::array();
  for (const auto& c : p.current_points) current.push_back(point_json(c));
  for (const auto& r : p.run_points) runs.push_back(point_json(r));
  for (const auto& a : p.run_arrows) {
    arrows.push_back({{"slot_id", a.slot_id}, {"from", point_json(a.from)}, {"to", point_json(a.to)}});
  }
  return {{"x_model", p.x_model},
          {"y_model", p.y_model},
          {"training_points", std::move(training)},
          {"current_points", std::move(current)},
          {"run_points", std::move(runs)},
          {"run_arrows", std::move(arrows)},
          {"x_hist", hist_json(p.x_hist)},
          {"y_hist", hist_json(p.y_hist)}};
}

}  // namespace scorelens::provenance
