#include "scorelens/provenance/run_log.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstring>
#include <ctime>
#include <fstream>

#include "scorelens/error.hpp"
#include "scorelens/provenance/hashing.hpp"

namespace scorelens::provenance {

namespace {

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[40];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
  char out[48];
  std::snprintf(out, sizeof out, "%s.%03dZ", buf, static_cast<int>(ms));
  return out;
}

template <typename T>
T field(const nlohmann::json& j, const char* name, const std::string& path) {
  if (!j.is_object() || !j.contains(name)) throw SchemaError(path + name, "missing");
  try {
    return j.at(name).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw SchemaError(path + name, "wrong type");
  }
}

void write_all(int fd, const std::string& data, const std::filesystem::path& path) {
  const char* p = data.data();
  std::size_t left = data.size();
  while (left > 0) {
    const ssize_t w = ::write(fd, p, left);
    if (w < 0) {
      if (errno == EINTR) continue;
      throw EngineError("write to " + path.string() + " failed: " + std::strerror(errno));
    }
    p += w;
    left -= static_cast<std::size_t>(w);
  }
}

}  // namespace

nlohmann::json to_json(const RunRecord& r) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : r.entries) {
    entries.push_back({{"slot_id", e.slot_id},
                       {"summary_hash", e.summary_hash},
                       {"summary_text", e.summary_text},
                       {"model_id", e.model_id},
                       {"score", e.score}});
  }
  return {{"run_number", r.run_number}, {"timestamp", r.timestamp}, {"entries", std::move(entries)}};
}

RunRecord run_record_from_json(const nlohmann::json& j) {
  RunRecord r;
  r.run_number = field<std::uint64_t>(j, "run_number", "");
  r.timestamp = field<std::string>(j, "timestamp", "");
  if (!j.contains("entries") || !j["entries"].is_array()) throw SchemaError("entries", "expected an array");
  for (std::size_t i = 0; i < j["entries"].size(); ++i) {
    const auto& e = j["entries"][i];
    const auto path = "entries[" + std::to_string(i) + "].";
    r.entries.push_back({field<std::string>(e, "slot_id", path), field<std::string>(e, "summary_hash", path),
                         field<std::string>(e, "summary_text", path), field<std::string>(e, "model_id", path),
                         field<double>(e, "score", path)});
  }
  return r;
}

nlohmann::json to_json(const HistoryRow& row) {
  return {{"run_number", row.run_number}, {"timestamp", row.timestamp},       {"model_id", row.model_id},
          {"score", row.score},           {"summary_text", row.summary_text}, {"summary_hash", row.summary_hash}};
}

RunLog::RunLog(std::filesystem::path path) : path_(std::move(path)) {
  if (path_.empty()) return;
  if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
  replay();
  fd_ = ::open(path_.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd_ < 0) throw EngineError("cannot open event log " + path_.string() + ": " + std::strerror(errno));
}

RunLog::~RunLog() {
  if (fd_ >= 0) ::close(fd_);
}

void RunLog::replay() {
  std::ifstream in(path_, std::ios::binary);
  if (!in) return;
  const std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  in.close();

  std::size_t pos = 0, good_end = 0, line_no = 0;
  while (pos < data.size()) {
    const auto nl = data.find('\n', pos);
    const bool complete = nl != std::string::npos;
    const auto line = std::string_view(data).substr(pos, (complete ? nl : data.size()) - pos);
    const std::size_t next = complete ? nl + 1 : data.size();
    ++line_no;
    if (line.empty()) {
      pos = good_end = next;
      continue;
    }
    const bool last = next >= data.size();
    std::optional<RunRecord> record;
    try {
      if (complete) record = run_record_from_json(nlohmann::json::parse(line));
    } catch (const std::exception&) {
    }
    if (!record) {
      // only the final line can be torn by a crash mid-append
      if (!last) throw EngineError("event log " + path_.string() + " line " + std::to_string(line_no) + " is corrupt");
      ++discarded_;
      break;
    }
    const auto expected = records_.empty() ? 1 : records_.back().run_number + 1;
    if (record->run_number != expected) {
      throw EngineError("event log " + path_.string() + " line " + std::to_string(line_no) + ": run number " +
                        std::to_string(record->run_number) + ", expected " + std::to_string(expected));
    }
    records_.push_back(std::move(*record));
    pos = good_end = next;
  }
  if (discarded_ > 0) std::filesystem::resize_file(path_, good_end);
}

RunRecord RunLog::record_run(const Assignment& snapshot, const std::vector<SlotScore>& scores) {
  std::vector<RunEntry> entries;
  entries.reserve(scores.size());
  for (const auto& s : scores) {
    const Slot* slot = nullptr;
    for (const auto& candidate : snapshot.slots) {
      if (candidate.slot_id == s.slot_id) slot = &candidate;
    }
    if (!slot) throw InvalidArgument("slot not in assignment: " + s.slot_id);
    entries.push_back({s.slot_id, text_hash(slot->text), slot->text, s.model_id, s.score});
  }
  return append(std::move(entries));
}

RunRecord RunLog::append(std::vector<RunEntry> entries) {
  if (entries.empty()) throw InvalidArgument("a run needs at least one entry");
  for (const auto& e : entries) {
    if (!std::isfinite(e.score)) throw InvalidArgument("score for slot " + e.slot_id + " is not finite");
  }
  std::unique_lock lock(mutex_);
  RunRecord record;
  record.run_number = records_.empty() ? 1 : records_.back().run_number + 1;
  record.timestamp = utc_now();
  record.entries = std::move(entries);
  if (fd_ >= 0) {
    write_all(fd_, to_json(record).dump() + "\n", path_);
    ::fsync(fd_);
  }
  records_.push_back(record);
  return record;
}

std::vector<HistoryRow> RunLog::get_history(std::string_view slot_id) const {
  std::shared_lock lock(mutex_);
  std::vector<HistoryRow> out;
  for (const auto& r : records_) {
    for (const auto& e : r.entries) {
      if (e.slot_id != slot_id) continue;
      out.push_back({r.run_number, r.timestamp, e.model_id, e.score, e.summary_text, e.summary_hash});
    }
  }
  return out;
}

std::map<std::string, double> RunLog::latest_scores(std::string_view slot_id, std::string_view summary_hash) const {
  std::shared_lock lock(mutex_);
  std::map<std::string, double> out;
  for (const auto& r : records_) {
    for (const auto& e : r.entries) {
      if (e.slot_id == slot_id && e.summary_hash == summary_hash) out[e.model_id] = e.score;
    }
  }
  return out;
}

std::vector<RunRecord> RunLog::records() const {
  std::shared_lock lock(mutex_);
  return records_;
}

std::uint64_t RunLog::last_run_number() const {
  std::shared_lock lock(mutex_);
  return records_.empty() ? 0 : records_.back().run_number;
}

}  // namespace scorelens::provenance
