#include "scorelens/provenance/training_corpus.hpp"

#include <cmath>
#include <fstream>

#include "scorelens/error.hpp"
#include "scorelens/provenance/hashing.hpp"
#include "scorelens/provenance/run_log.hpp"

namespace scorelens::provenance {

namespace {

std::string string_field(const nlohmann::json& j, const char* name) {
  if (!j.contains(name)) throw SchemaError(name, "missing");
  if (!j[name].is_string()) throw SchemaError(name, "expected a string");
  return j[name].get<std::string>();
}

double number_field(const nlohmann::json& j, const char* name) {
  if (!j.contains(name)) throw SchemaError(name, "missing");
  if (!j[name].is_number()) throw SchemaError(name, "expected a number");
  const double v = j[name].get<double>();
  if (!std::isfinite(v)) throw SchemaError(name, "not finite");
  return v;
}

}  // namespace

nlohmann::json to_json(const TrainingExample& e) {
  nlohmann::json j = {{"example_id", e.example_id}, {"source", e.source}, {"summary", e.summary}};
  j["rubric"] = e.rubric ? nlohmann::json(*e.rubric) : nlohmann::json(nullptr);
  j["content"] = e.content;
  j["wording"] = e.wording;
  return j;
}

TrainingExample training_example_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw SchemaError("", "expected an object");
  TrainingExample e;
  e.example_id = string_field(j, "example_id");
  if (e.example_id.empty()) throw SchemaError("example_id", "empty");
  e.source = string_field(j, "source");
  e.summary = string_field(j, "summary");
  if (j.contains("rubric") && !j["rubric"].is_null()) {
    const auto& r = j["rubric"];
    if (!r.is_array() || r.size() != kRubricCriteria) throw SchemaError("rubric", "expected six numbers");
    Rubric rubric{};
    for (std::size_t i = 0; i < kRubricCriteria; ++i) {
      const auto path = "rubric[" + std::to_string(i) + "]";
      if (!r[i].is_number()) throw SchemaError(path, "expected a number");
      rubric[i] = r[i].get<double>();
      if (!(rubric[i] >= 1.0 && rubric[i] <= 4.0)) throw SchemaError(path, "outside [1, 4]");
    }
    e.rubric = rubric;
  }
  e.content = number_field(j, "content");
  e.wording = number_field(j, "wording");
  return e;
}

IngestReport TrainingCorpus::ingest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw EngineError("cannot read training corpus " + path.string());
  IngestReport report;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      add(training_example_from_json(nlohmann::json::parse(line)));
      ++report.accepted;
    } catch (const std::exception& e) {
      report.rejected.push_back({line_no, e.what()});
    }
  }
  return report;
}

void TrainingCorpus::add(TrainingExample example) {
  if (index_.contains(example.example_id)) throw InvalidArgument("duplicate example id " + example.example_id);
  index_.emplace(example.example_id, examples_.size());
  examples_.push_back(std::move(example));
}

const TrainingExample& TrainingCorpus::get(std::string_view example_id) const {
  const auto it = index_.find(example_id);
  if (it == index_.end()) throw NotFound("training example not found: " + std::string(example_id));
  return examples_[it->second];
}

double TrainingCorpus::axis_value(const TrainingExample& example, std::string_view dimension) {
  if (dimension == "content") return example.content;
  if (dimension == "wording") return example.wording;
  throw InvalidArgument("unknown score dimension '" + std::string(dimension) + "'");
}

void TrainingCorpus::write(const std::filesystem::path& path) const {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw EngineError("cannot write " + tmp);
    for (const auto& e : examples_) out << to_json(e).dump() << '\n';
    if (!out) throw EngineError("write to " + tmp + " failed");
  }
  std::filesystem::rename(tmp, path);
}

std::string example_assignment_id(std::string_view example_id) { return "example-" + std::string(example_id); }

Assignment load_example(const TrainingCorpus& corpus, const RunLog& log, std::string_view example_id) {
  const auto& e = corpus.get(example_id);
  Assignment a;
  a.id = example_assignment_id(e.example_id);
  a.source = e.source;
  Slot slot;
  slot.slot_id = a.id;
  slot.text = e.summary;
  slot.cached_scores = log.latest_scores(slot.slot_id, text_hash(slot.text));
  a.slots.push_back(std::move(slot));
  return a;
}

}  // namespace scorelens::provenance
