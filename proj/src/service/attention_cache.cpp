#include "scorelens/service/attention_cache.hpp"

#include <mutex>

#include "scorelens/error.hpp"

namespace scorelens::service {

AttentionCache::AttentionCache(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw InvalidArgument("attention cache capacity must be positive");
}

AttentionCache::Value AttentionCache::find(const std::string& key) const {
  std::shared_lock lock(mutex_);
  const auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : it->second.value;
}

void AttentionCache::touch(const std::string& key) {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return;
  order_.splice(order_.begin(), order_, it->second.position);
}

AttentionCache::Value AttentionCache::get_or_compute(const std::string& key, const std::function<Value()>& compute) {
  if (auto hit = find(key)) {
    std::unique_lock lock(mutex_);
    ++hits_;
    touch(key);
    return hit;
  }
  // compute outside the lock; concurrent misses on one key may both compute
  auto value = compute();
  std::unique_lock lock(mutex_);
  if (const auto it = entries_.find(key); it != entries_.end()) {
    ++hits_;
    touch(key);
    return it->second.value;
  }
  ++misses_;
  order_.push_front(key);
  entries_.emplace(key, Entry{value, order_.begin()});
  while (entries_.size() > capacity_) {
    entries_.erase(order_.back());
    order_.pop_back();
  }
  return value;
}

std::size_t AttentionCache::size() const {
  std::shared_lock lock(mutex_);
  return entries_.size();
}

std::size_t AttentionCache::hits() const {
  std::shared_lock lock(mutex_);
  return hits_;
}

std::size_t AttentionCache::misses() const {
  std::shared_lock lock(mutex_);
  return misses_;
}

}  // namespace scorelens::service
