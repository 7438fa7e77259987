#pragma once

#include <cstddef>
#include <functional>
#include <list>
#include <memory>
#include <shared_mutex>
#include <string>
#include <unordered_map>

#include "scorelens/scoring/wire.hpp"

namespace scorelens::service {

/// LRU cache of scored pairs with attention, keyed by (model id, pair hash).
/// Lookups take a shared lock; inserts, evictions and recency updates take
/// the exclusive one.
class AttentionCache {
 public:
  using Value = std::shared_ptr<const scoring::ScoreResult>;

  explicit AttentionCache(std::size_t capacity = 8);

  Value find(const std::string& key) const;

  /// Returns the cached value, computing and inserting it on a miss.
  Value get_or_compute(const std::string& key, const std::function<Value()>& compute);

  std::size_t size() const;
  std::size_t capacity() const { return capacity_; }
  std::size_t hits() const;
  std::size_t misses() const;

  static std::string key(const std::string& model_id, const std::string& pair_hash) {
    return model_id + "|" + pair_hash;
  }

 private:
  void touch(const std::string& key);

  std::size_t capacity_;
  mutable std::shared_mutex mutex_;
  std::list<std::string> order_;  // front = most recent
  struct Entry {
    Value value;
    std::list<std::string>::iterator position;
  };
  std::unordered_map<std::string, Entry> entries_;
  std::size_t hits_ = 0;
  std::size_t misses_ = 0;
};

}  // namespace scorelens::service
