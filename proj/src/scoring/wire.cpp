#include "scorelens/scoring/wire.hpp"

#include <cmath>

#include "scorelens/attention/attention_wire.hpp"
#include "scorelens/error.hpp"

namespace scorelens::scoring {

using nlohmann::json;

json to_json(const ScoreRequest& r) {
  return json{{"model_id", r.model_id}, {"source", r.source}, {"summary", r.summary}, {"want_attention", r.want_attention}};
}

namespace {

const json& required(const json& j, const std::string& key, const std::string& path) {
  const auto it = j.find(key);
  if (it == j.end()) throw SchemaError(path.empty() ? key : path + "." + key, "missing");
  return *it;
}

std::string string_field(const json& j, const std::string& key) {
  const auto& v = required(j, key, "");
  if (!v.is_string()) throw SchemaError(key, "expected string");
  return v.get<std::string>();
}

}  // namespace

ScoreRequest score_request_from_json(const json& j) {
  if (!j.is_object()) throw SchemaError("body", "expected object");
  ScoreRequest r;
  r.model_id = string_field(j, "model_id");
  r.source = string_field(j, "source");
  r.summary = string_field(j, "summary");
  if (const auto it = j.find("want_attention"); it != j.end()) {
    if (!it->is_boolean()) throw SchemaError("want_attention", "expected boolean");
    r.want_attention = it->get<bool>();
  }
  return r;
}

json token_to_json(const TokenInfo& t) {
  return json{{"start", t.start}, {"end", t.end}, {"segment", to_string(t.segment)}, {"global", t.global}};
}

json score_response_to_json(const ScoreResult& r) {
  json tokens = json::array();
  for (const auto& t : r.tokens) tokens.push_back(token_to_json(t));
  json j{{"score", r.score}, {"truncated", r.truncated}, {"tokens", std::move(tokens)}};
  if (r.attention) j["attention"] = attention::tensor_to_json(*r.attention);
  return j;
}

ScoreResult score_response_from_json(const json& j, const ScoreRequest& request) {
  if (!j.is_object()) throw SchemaError("body", "expected object");
  ScoreResult r;
  r.model_id = request.model_id;

  const auto& score = required(j, "score", "");
  if (!score.is_number()) throw SchemaError("score", "expected number");
  r.score = score.get<double>();
  if (!std::isfinite(r.score)) throw SchemaError("score", "must be finite");

  if (const auto it = j.find("truncated"); it != j.end()) {
    if (!it->is_boolean()) throw SchemaError("truncated", "expected boolean");
    r.truncated = it->get<bool>();
  }

  if (const auto it = j.find("tokens"); it != j.end()) {
    if (!it->is_array()) throw SchemaError("tokens", "expected array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const auto& t = (*it)[i];
      const std::string path = "tokens[" + std::to_string(i) + "]";
      if (!t.is_object()) throw SchemaError(path, "expected object");
      TokenInfo info;
      const auto& start = required(t, "start", path);
      const auto& end = required(t, "end", path);
      if (!start.is_number_integer() || start.get<long long>() < 0) throw SchemaError(path + ".start", "expected offset");
      if (!end.is_number_integer() || end.get<long long>() < 0) throw SchemaError(path + ".end", "expected offset");
      info.start = start.get<std::size_t>();
      info.end = end.get<std::size_t>();
      const auto& seg = required(t, "segment", path);
      if (!seg.is_string()) throw SchemaError(path + ".segment", "expected string");
      try {
        info.segment = segment_from_string(seg.get<std::string>());
      } catch (const InvalidArgument& e) {
        throw SchemaError(path + ".segment", e.what());
      }
      if (const auto g = t.find("global"); g != t.end()) {
        if (!g->is_boolean()) throw SchemaError(path + ".global", "expected boolean");
        info.global = g->get<bool>();
      }
      const std::string* text = info.segment == Segment::source    ? &request.source
                                : info.segment == Segment::summary ? &request.summary
                                                                    : nullptr;
      if (text) {
        if (info.start > info.end || info.end > text->size()) throw SchemaError(path + ".end", "offset outside segment text");
        info.surface = text->substr(info.start, info.end - info.start);
      } else {
        switch (info.segment) {
          case Segment::begin_marker: info.surface = kBeginSurface; break;
          case Segment::separator: info.surface = kSepSurface; break;
          default: info.surface = kEndSurface; break;
        }
      }
      r.tokens.push_back(std::move(info));
    }
  }

  if (const auto it = j.find("attention"); it != j.end() && !it->is_null()) {
    if (r.tokens.empty()) throw SchemaError("tokens", "attention requires token metadata");
    auto tensor = attention::tensor_from_json(*it, r.tokens.size(), "attention");
    for (std::size_t i = 0; i < r.tokens.size(); ++i) {
      if (r.tokens[i].global != tensor.is_global(i)) {
        throw SchemaError("attention.global_indices", "disagrees with tokens[" + std::to_string(i) + "].global");
      }
    }
    r.attention = std::make_shared<const attention::AttentionTensor>(std::move(tensor));
  }
  return r;
}

}  // namespace scorelens::scoring
