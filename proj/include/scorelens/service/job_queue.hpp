#pragma once

#include <condition_variable>
#include <cstddef>
#include <deque>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

namespace scorelens::service {

enum class JobStatus { queued, running, done, failed };

std::string to_string(JobStatus status);

struct JobSnapshot {
  std::string id;
  JobStatus status = JobStatus::queued;
  nlohmann::json result;  // set when done
  nlohmann::json error;   // {"error", "detail"} when failed
};

nlohmann::json to_json(const JobSnapshot& job);

/// Fixed pool of worker threads running submitted tasks in FIFO order.
class JobQueue {
 public:
  using Task = std::function<nlohmann::json()>;
  /// Turns a task's exception into an {"error", "detail"} object.
  using ErrorMapper = std::function<nlohmann::json(std::exception_ptr)>;

  JobQueue(std::size_t workers, ErrorMapper map_error);
  ~JobQueue();

  JobQueue(const JobQueue&) = delete;
  JobQueue& operator=(const JobQueue&) = delete;

  std::string submit(Task task);
  std::optional<JobSnapshot> get(const std::string& id) const;

  /// Blocks until the job finishes; nullopt for an unknown id.
  std::optional<JobSnapshot> wait(const std::string& id) const;

 private:
  void worker();
  std::string new_id();

  ErrorMapper map_error_;
  mutable std::mutex mutex_;
  mutable std::condition_variable changed_;
  std::deque<std::pair<std::string, Task>> pending_;
  std::map<std::string, JobSnapshot> jobs_;
  bool stopping_ = false;
  std::uint64_t counter_ = 0;
  std::uint64_t salt_ = 0;
  std::vector<std::jthread> threads_;
};

}  // namespace scorelens::service
