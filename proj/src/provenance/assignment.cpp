#include "scorelens/provenance/assignment.hpp"

#include "scorelens/error.hpp"

namespace scorelens::provenance {

const Slot& Assignment::slot(const std::string& slot_id) const {
  for (const auto& s : slots) {
    if (s.slot_id == slot_id) return s;
  }
  throw NotFound("slot not found: " + slot_id);
}

Slot& Assignment::slot(const std::string& slot_id) {
  return const_cast<Slot&>(static_cast<const Assignment&>(*this).slot(slot_id));
}

nlohmann::json to_json(const SlotOptions& o) {
  return {{"grammar", o.grammar},
          {"words", o.words},
          {"sentences", o.sentences},
          {"tokens", o.tokens},
          {"attention", o.attention}};
}

SlotOptions slot_options_from_json(const nlohmann::json& j, const std::string& field) {
  SlotOptions o;
  if (j.is_null()) return o;
  if (!j.is_object()) throw SchemaError(field, "expected an object");
  auto flag = [&](const char* name, bool& out) {
    if (!j.contains(name)) return;
    if (!j[name].is_boolean()) throw SchemaError(field + "." + name, "expected a boolean");
    out = j[name].get<bool>();
  };
  flag("grammar", o.grammar);
  flag("words", o.words);
  flag("sentences", o.sentences);
  flag("tokens", o.tokens);
  flag("attention", o.attention);
  return o;
}

nlohmann::json to_json(const Assignment& a) {
  nlohmann::json slots = nlohmann::json::array();
  for (const auto& s : a.slots) {
    slots.push_back({{"slot_id", s.slot_id},
                     {"text", s.text},
                     {"options", to_json(s.options)},
                     {"cached_scores", s.cached_scores}});
  }
  return {{"id", a.id}, {"source", a.source}, {"slots", std::move(slots)}};
}

}  // namespace scorelens::provenance
