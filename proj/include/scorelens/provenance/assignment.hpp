#pragma once

#include <map>
#include <string>
#include <vector>

#include "json.hpp"

namespace scorelens::provenance {

/// Which analyses the user asked for on one summary.
struct SlotOptions {
  bool grammar = false;
  bool words = false;
  bool sentences = false;
  bool tokens = false;
  bool attention = false;

  friend bool operator==(const SlotOptions&, const SlotOptions&) = default;
};

struct Slot {
  std::string slot_id;
  std::string text;
  SlotOptions options;
  std::map<std::string, double> cached_scores;  // model id -> latest score for this text

  friend bool operator==(const Slot&, const Slot&) = default;
};

/// One source text with any number of summary slots.
struct Assignment {
  std::string id;
  std::string source;
  std::vector<Slot> slots;

  const Slot& slot(const std::string& slot_id) const;  // NotFound
  Slot& slot(const std::string& slot_id);

  friend bool operator==(const Assignment&, const Assignment&) = default;
};

nlohmann::json to_json(const SlotOptions& options);
SlotOptions slot_options_from_json(const nlohmann::json& j, const std::string& field);
nlohmann::json to_json(const Assignment& assignment);

}  // namespace scorelens::provenance
