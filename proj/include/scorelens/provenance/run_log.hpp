#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "scorelens/provenance/assignment.hpp"

namespace scorelens::provenance {

struct RunEntry {
  std::string slot_id;
  std::string summary_hash;
  std::string summary_text;
  std::string model_id;
  double score = 0.0;

  friend bool operator==(const RunEntry&, const RunEntry&) = default;
};

struct RunRecord {
  std::uint64_t run_number = 0;
  std::string timestamp;  // UTC, ISO 8601
  std::vector<RunEntry> entries;

  friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

struct SlotScore {
  std::string slot_id;
  std::string model_id;
  double score = 0.0;
};

struct HistoryRow {
  std::uint64_t run_number = 0;
  std::string timestamp;
  std::string model_id;
  double score = 0.0;
  std::string summary_text;
  std::string summary_hash;

  friend bool operator==(const HistoryRow&, const HistoryRow&) = default;
};

nlohmann::json to_json(const RunRecord& record);
RunRecord run_record_from_json(const nlohmann::json& j);  // SchemaError
nlohmann::json to_json(const HistoryRow& row);

/// Append-only log of scoring runs, persisted as one JSON record per line.
/// Opening replays the file; a torn final line left by a crash is discarded.
/// Writers are serialized, readers see a consistent snapshot.
class RunLog {
 public:
  /// An empty path keeps the log in memory only.
  explicit RunLog(std::filesystem::path path = {});
  ~RunLog();

  RunLog(const RunLog&) = delete;
  RunLog& operator=(const RunLog&) = delete;

  /// Appends one run. Each slot's current text is taken from the snapshot
  /// and persisted with its hash. Throws InvalidArgument on an empty entry
  /// list or unknown slot, EngineError on a failed write.
  RunRecord record_run(const Assignment& snapshot, const std::vector<SlotScore>& scores);

  /// Lower-level form with texts already attached.
  RunRecord append(std::vector<RunEntry> entries);

  /// Chronological rows for one slot; empty for an unknown slot.
  std::vector<HistoryRow> get_history(std::string_view slot_id) const;

  /// model id -> most recent score recorded for this slot and text hash.
  std::map<std::string, double> latest_scores(std::string_view slot_id, std::string_view summary_hash) const;

  std::vector<RunRecord> records() const;
  std::uint64_t last_run_number() const;
  const std::filesystem::path& path() const { return path_; }

  /// Lines dropped while replaying (torn tail).
  std::size_t discarded_lines() const { return discarded_; }

 private:
  void replay();

  std::filesystem::path path_;
  int fd_ = -1;
  mutable std::shared_mutex mutex_;
  std::vector<RunRecord> records_;
  std::size_t discarded_ = 0;
};

}  // namespace scorelens::provenance
