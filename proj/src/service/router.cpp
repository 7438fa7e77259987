#include "scorelens/service/router.hpp"

#include <charconv>
#include <vector>

#include "scorelens/attention/attention_wire.hpp"
#include "scorelens/error.hpp"

namespace scorelens::service {

namespace {

using nlohmann::json;

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> parts;
  std::size_t i = 0;
  while (i < path.size()) {
    while (i < path.size() && path[i] == '/') ++i;
    const auto j = path.find('/', i);
    const auto end = j == std::string::npos ? path.size() : j;
    if (end > i) parts.push_back(path.substr(i, end - i));
    i = end;
  }
  return parts;
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

std::string url_decode(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '+') {
      out += ' ';
    } else if (s[i] == '%' && i + 2 < s.size() && hex_value(s[i + 1]) >= 0 && hex_value(s[i + 2]) >= 0) {
      out += static_cast<char>(hex_value(s[i + 1]) * 16 + hex_value(s[i + 2]));
      i += 2;
    } else {
      out += s[i];
    }
  }
  return out;
}

json parse_body(const std::string& body) {
  if (body.empty()) throw SchemaError("body", "expected a JSON object");
  json j;
  try {
    j = json::parse(body);
  } catch (const json::exception& e) {
    throw SchemaError("body", std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw SchemaError("body", "expected a JSON object");
  return j;
}

std::string required_string(const json& j, const std::string& key) {
  if (!j.contains(key)) throw SchemaError(key, "missing");
  if (!j[key].is_string()) throw SchemaError(key, "expected a string");
  return j[key].get<std::string>();
}

std::optional<std::string> optional_string(const json& j, const std::string& key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  if (!j[key].is_string()) throw SchemaError(key, "expected a string");
  return j[key].get<std::string>();
}

std::vector<std::string> model_ids_of(const json& j) {
  std::vector<std::string> ids;
  if (!j.contains("model_ids") || j["model_ids"].is_null()) return ids;
  if (!j["model_ids"].is_array()) throw SchemaError("model_ids", "expected an array of strings");
  for (std::size_t i = 0; i < j["model_ids"].size(); ++i) {
    if (!j["model_ids"][i].is_string()) throw SchemaError("model_ids[" + std::to_string(i) + "]", "expected a string");
    ids.push_back(j["model_ids"][i].get<std::string>());
  }
  return ids;
}

std::vector<NewSlot> summaries_of(const json& j) {
  if (!j.contains("summaries")) throw SchemaError("summaries", "missing");
  if (!j["summaries"].is_array()) throw SchemaError("summaries", "expected an array");
  if (j["summaries"].empty()) throw InvalidArgument("summaries must be non-empty");
  std::vector<NewSlot> slots;
  for (std::size_t i = 0; i < j["summaries"].size(); ++i) {
    const auto& s = j["summaries"][i];
    const auto path = "summaries[" + std::to_string(i) + "]";
    NewSlot slot;
    if (s.is_string()) {
      slot.text = s.get<std::string>();
    } else if (s.is_object()) {
      if (!s.contains("text") || !s["text"].is_string()) throw SchemaError(path + ".text", "expected a string");
      slot.text = s["text"].get<std::string>();
      if (s.contains("slot_id") && !s["slot_id"].is_null()) {
        if (!s["slot_id"].is_string()) throw SchemaError(path + ".slot_id", "expected a string");
        slot.slot_id = s["slot_id"].get<std::string>();
      }
      slot.options = provenance::slot_options_from_json(s.value("options", json(nullptr)), path + ".options");
    } else {
      throw SchemaError(path, "expected a string or an object");
    }
    slots.push_back(std::move(slot));
  }
  return slots;
}

std::size_t query_index(const std::map<std::string, std::string>& q, const std::string& key,
                        std::optional<std::size_t> fallback) {
  const auto it = q.find(key);
  if (it == q.end() || it->second.empty()) {
    if (fallback) return *fallback;
    throw InvalidArgument("query parameter '" + key + "' is required");
  }
  std::size_t v = 0;
  const auto& s = it->second;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw InvalidArgument("query parameter '" + key + "' must be a non-negative integer");
  }
  return v;
}

std::string query_string(const std::map<std::string, std::string>& q, const std::string& key) {
  const auto it = q.find(key);
  if (it == q.end() || it->second.empty()) throw InvalidArgument("query parameter '" + key + "' is required");
  return it->second;
}

HttpResponse not_found(const std::string& path) {
  return {404, {{"error", "route not found: " + path}, {"detail", {{"path", path}}}}};
}

HttpResponse method_not_allowed(const HttpRequest& r) {
  return {405, {{"error", "method " + r.method + " not allowed on " + r.path}, {"detail", {{"path", r.path}}}}};
}

}  // namespace

std::map<std::string, std::string> parse_query(const std::string& query) {
  std::map<std::string, std::string> out;
  std::size_t i = 0;
  while (i <= query.size()) {
    const auto amp = query.find('&', i);
    const auto end = amp == std::string::npos ? query.size() : amp;
    const auto pair = std::string_view(query).substr(i, end - i);
    if (!pair.empty()) {
      const auto eq = pair.find('=');
      out[url_decode(pair.substr(0, eq))] = eq == std::string_view::npos ? "" : url_decode(pair.substr(eq + 1));
    }
    if (amp == std::string::npos) break;
    i = amp + 1;
  }
  return out;
}

HttpResponse Router::handle(const HttpRequest& request) const {
  try {
    return dispatch(request);
  } catch (...) {
    auto e = describe_error(std::current_exception());
    return {e.status, std::move(e.body)};
  }
}

HttpResponse Router::dispatch(const HttpRequest& r) const {
  const auto parts = split_path(r.path);
  const bool get = r.method == "GET";
  const bool post = r.method == "POST";

  if (parts.size() == 1 && parts[0] == "score") {
    if (!post) return method_not_allowed(r);
    const auto req = scoring::score_request_from_json(parse_body(r.body));
    const auto result = workbench_.scorer().score_pair(req.model_id, req.source, req.summary, req.want_attention);
    return {200, scoring::score_response_to_json(result)};
  }
  if (parts.empty() || parts[0] != "api") return not_found(r.path);

  if (parts.size() == 2 && parts[1] == "models") {
    if (!get) return method_not_allowed(r);
    json models = json::array();
    for (const auto& c : workbench_.scorer().models()) models.push_back(scoring::to_json(c, true));
    return {200, models};
  }

  if (parts.size() == 2 && parts[1] == "assignments") {
    if (!post) return method_not_allowed(r);
    const auto body = parse_body(r.body);
    auto slots = summaries_of(body);
    const auto a = workbench_.put_assignment(required_string(body, "source"), std::move(slots),
                                             optional_string(body, "id"));
    return {200, provenance::to_json(a)};
  }

  if (parts.size() == 2 && parts[1] == "score") {
    if (!post) return method_not_allowed(r);
    const auto body = parse_body(r.body);
    std::string assignment_id;
    if (body.contains("summaries")) {
      auto slots = summaries_of(body);
      assignment_id = workbench_
                          .put_assignment(required_string(body, "source"), std::move(slots),
                                          optional_string(body, "assignment_id"))
                          .id;
    } else {
      assignment_id = required_string(body, "assignment_id");
    }
    auto out = to_json(workbench_.score(assignment_id, model_ids_of(body)));
    out["assignment_id"] = assignment_id;
    return {200, out};
  }

  if (parts.size() == 2 && parts[1] == "perturb") {
    if (!post) return method_not_allowed(r);
    const auto body = parse_body(r.body);
    const auto method = perturb::method_from_string(required_string(body, "method"));
    const auto id = workbench_.submit_perturbation(required_string(body, "assignment_id"),
                                                   required_string(body, "slot_id"),
                                                   required_string(body, "model_id"), method);
    return {202, {{"job_id", id}}};
  }

  if (parts.size() == 3 && parts[1] == "jobs") {
    if (!get) return method_not_allowed(r);
    const auto job = workbench_.job(parts[2]);
    if (!job) throw NotFound("job not found: " + parts[2]);
    return {200, to_json(*job)};
  }

  if (parts.size() == 5 && parts[1] == "attention") {
    if (!get) return method_not_allowed(r);
    const auto token = query_index(r.query, "token", std::nullopt);
    const auto layer = query_index(r.query, "layer", 0);
    const auto head = query_index(r.query, "head", 0);
    const auto it = r.query.find("mode");
    const auto kind = attention::slice_kind_from_string(it == r.query.end() ? "rug" : it->second);
    attention::SliceMode mode = kind == attention::SliceMode::Kind::by_layer  ? attention::SliceMode::by_layer(head)
                                : kind == attention::SliceMode::Kind::by_head ? attention::SliceMode::by_head(layer)
                                                                              : attention::SliceMode::rug(layer, head);
    return {200, workbench_.attention_slice(parts[2], parts[3], parts[4], token, mode)};
  }

  if (parts.size() == 2 && parts[1] == "history") {
    if (!get) return method_not_allowed(r);
    const auto slot = query_string(r.query, "slot");
    json rows = json::array();
    for (const auto& row : workbench_.history(slot)) rows.push_back(provenance::to_json(row));
    return {200, {{"slot_id", slot}, {"rows", std::move(rows)}}};
  }

  if (parts.size() == 3 && parts[1] == "training" && parts[2] == "scatter") {
    if (!get) return method_not_allowed(r);
    return {200, provenance::to_json(workbench_.scatter(query_string(r.query, "x"), query_string(r.query, "y")))};
  }

  if (parts.size() == 4 && parts[1] == "training" && parts[3] == "load") {
    if (!post) return method_not_allowed(r);
    return {200, provenance::to_json(workbench_.load_example(parts[2]))};
  }

  return not_found(r.path);
}

}  // namespace scorelens::service
