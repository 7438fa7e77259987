#include "scorelens/service/job_queue.hpp"

#include <cstdio>
#include <random>

namespace scorelens::service {

std::string to_string(JobStatus status) {
  switch (status) {
    case JobStatus::queued: return "queued";
    case JobStatus::running: return "running";
    case JobStatus::done: return "done";
    case JobStatus::failed: return "failed";
  }
  return "?";
}

nlohmann::json to_json(const JobSnapshot& job) {
  nlohmann::json j = {{"id", job.id}, {"status", to_string(job.status)}};
  if (job.status == JobStatus::done) j["result"] = job.result;
  if (job.status == JobStatus::failed) j["error"] = job.error;
  return j;
}

JobQueue::JobQueue(std::size_t workers, ErrorMapper map_error) : map_error_(std::move(map_error)) {
  salt_ = std::random_device{}();
  salt_ = (salt_ << 32) ^ std::random_device{}();
  if (workers == 0) workers = 1;
  for (std::size_t i = 0; i < workers; ++i) threads_.emplace_back([this] { worker(); });
}

JobQueue::~JobQueue() {
  {
    std::lock_guard lock(mutex_);
    stopping_ = true;
  }
  changed_.notify_all();
  threads_.clear();
}

std::string JobQueue::new_id() {
  std::uint64_t x = salt_ + 0x9e3779b97f4a7c15ULL * ++counter_;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  x ^= x >> 31;
  char buf[24];
  std::snprintf(buf, sizeof buf, "job-%016llx", static_cast<unsigned long long>(x));
  return buf;
}

std::string JobQueue::submit(Task task) {
  std::string id;
  {
    std::lock_guard lock(mutex_);
    id = new_id();
    jobs_[id] = JobSnapshot{id, JobStatus::queued, nullptr, nullptr};
    pending_.emplace_back(id, std::move(task));
  }
  changed_.notify_all();
  return id;
}

std::optional<JobSnapshot> JobQueue::get(const std::string& id) const {
  std::lock_guard lock(mutex_);
  const auto it = jobs_.find(id);
  if (it == jobs_.end()) return std::nullopt;
  return it->second;
}

std::optional<JobSnapshot> JobQueue::wait(const std::string& id) const {
  std::unique_lock lock(mutex_);
  if (!jobs_.contains(id)) return std::nullopt;
  changed_.wait(lock, [&] {
    const auto s = jobs_.at(id).status;
    return s == JobStatus::done || s == JobStatus::failed;
  });
  return jobs_.at(id);
}

void JobQueue::worker() {
  for (;;) {
    std::pair<std::string, Task> item;
    {
      std::unique_lock lock(mutex_);
      changed_.wait(lock, [&] { return stopping_ || !pending_.empty(); });
      if (pending_.empty()) return;
      item = std::move(pending_.front());
      pending_.pop_front();
      jobs_[item.first].status = JobStatus::running;
    }
    JobSnapshot finished{item.first, JobStatus::done, nullptr, nullptr};
    try {
      finished.result = item.second();
    } catch (...) {
      finished.status = JobStatus::failed;
      finished.error = map_error_(std::current_exception());
    }
    {
      std::lock_guard lock(mutex_);
      jobs_[item.first] = std::move(finished);
    }
    changed_.notify_all();
  }
}

}  // namespace scorelens::service
