#include "scorelens/attention/attention_wire.hpp"

#include <cmath>
#include <limits>

#include "scorelens/error.hpp"

namespace scorelens::attention {

using nlohmann::json;

namespace {

json block_to_json(const std::vector<float>& data, std::size_t outer, std::size_t rows, std::size_t cols) {
  json out = json::array();
  std::size_t i = 0;
  for (std::size_t o = 0; o < outer; ++o) {
    json mat = json::array();
    for (std::size_t r = 0; r < rows; ++r) {
      json row = json::array();
      for (std::size_t c = 0; c < cols; ++c, ++i) {
        if (std::isnan(data[i])) row.push_back(nullptr);
        else row.push_back(data[i]);
      }
      mat.push_back(std::move(row));
    }
    out.push_back(std::move(mat));
  }
  return out;
}

std::vector<float> block_from_json(const json& j, const std::string& field, std::size_t outer, std::size_t rows,
                                   std::size_t cols, bool allow_null) {
  if (!j.is_array() || j.size() != outer) throw SchemaError(field, "expected " + std::to_string(outer) + " matrices");
  std::vector<float> out;
  out.reserve(outer * rows * cols);
  for (std::size_t o = 0; o < outer; ++o) {
    const auto& mat = j[o];
    if (!mat.is_array() || mat.size() != rows) throw SchemaError(field, "expected " + std::to_string(rows) + " rows");
    for (std::size_t r = 0; r < rows; ++r) {
      const auto& row = mat[r];
      if (!row.is_array() || row.size() != cols) {
        throw SchemaError(field, "expected " + std::to_string(cols) + " columns");
      }
      for (const auto& v : row) {
        if (v.is_null() && allow_null) {
          out.push_back(std::numeric_limits<float>::quiet_NaN());
        } else if (v.is_number()) {
          const double d = v.get<double>();
          if (!std::isfinite(d) || d < 0.0 || d > 1.0) throw SchemaError(field, "weight outside [0,1]");
          out.push_back(static_cast<float>(d));
        } else {
          throw SchemaError(field, "expected number");
        }
      }
    }
  }
  return out;
}

std::size_t positive_count(const json& j, const std::string& key, const std::string& field) {
  const auto it = j.find(key);
  if (it == j.end()) throw SchemaError(field + "." + key, "missing");
  if (!it->is_number_integer() || it->get<long long>() < 1) throw SchemaError(field + "." + key, "expected positive integer");
  return it->get<std::size_t>();
}

}  // namespace

json tensor_to_json(const AttentionTensor& t) {
  const std::size_t lh = t.layers() * t.heads();
  const std::size_t g = t.global_indices().size();
  return json{{"layers", t.layers()},
              {"heads", t.heads()},
              {"window", t.window()},
              {"global_indices", t.global_indices()},
              {"band", block_to_json(t.band(), lh, t.n(), t.band_width())},
              {"global_rows", block_to_json(t.global_rows(), lh, g, t.n())},
              {"global_cols", block_to_json(t.global_cols(), lh, t.n(), g)}};
}

AttentionTensor tensor_from_json(const json& j, std::size_t n, const std::string& field) {
  if (!j.is_object()) throw SchemaError(field, "expected object");
  const auto layers = positive_count(j, "layers", field);
  const auto heads = positive_count(j, "heads", field);
  const auto window = positive_count(j, "window", field);
  if (window < 2 || window % 2 != 0) throw SchemaError(field + ".window", "window must be even and >= 2");

  const auto gi = j.find("global_indices");
  if (gi == j.end() || !gi->is_array()) throw SchemaError(field + ".global_indices", "expected array");
  std::vector<std::uint32_t> globals;
  for (const auto& v : *gi) {
    if (!v.is_number_integer() || v.get<long long>() < 0 || v.get<std::size_t>() >= n) {
      throw SchemaError(field + ".global_indices", "index out of range");
    }
    const auto idx = v.get<std::uint32_t>();
    if (!globals.empty() && globals.back() >= idx) throw SchemaError(field + ".global_indices", "must be sorted and unique");
    globals.push_back(idx);
  }

  const std::size_t lh = layers * heads;
  const std::size_t g = globals.size();
  auto block = [&](const char* key, std::size_t rows, std::size_t cols, bool allow_null) {
    const auto it = j.find(key);
    if (it == j.end()) throw SchemaError(field + "." + key, "missing");
    return block_from_json(*it, field + "." + key, lh, rows, cols, allow_null);
  };
  auto band = block("band", n, window + 1, true);
  auto rows = block("global_rows", g, n, false);
  auto cols = block("global_cols", n, g, false);

  // layout rules the packer guarantees: missing cells exactly where the mask
  // (or global dedup) leaves no band entry
  std::vector<bool> is_global(n, false);
  for (auto x : globals) is_global[x] = true;
  const std::size_t hw = window / 2;
  for (std::size_t o = 0; o < lh; ++o)
    for (std::size_t q = 0; q < n; ++q)
      for (std::size_t off = 0; off <= window; ++off) {
        const long long k = static_cast<long long>(q) + static_cast<long long>(off) - static_cast<long long>(hw);
        const bool expect_stored = !is_global[q] && k >= 0 && k < static_cast<long long>(n) &&
                                   !is_global[static_cast<std::size_t>(k)];
        const bool stored = !std::isnan(band[(o * n + q) * (window + 1) + off]);
        if (stored != expect_stored) {
          throw SchemaError(field + ".band", expect_stored ? "missing weight inside window" : "weight outside window");
        }
      }

  AttentionTensor tensor(n, layers, heads, window, std::move(globals), std::move(band), std::move(rows),
                         std::move(cols));
  if (auto err = tensor.check_invariants()) throw SchemaError(field, *err);
  return tensor;
}

json cell_to_json(const CellState& cell) {
  switch (cell.state) {
    case CellState::State::weight: return json{{"s", "w"}, {"v", cell.value}};
    case CellState::State::zero: return json{{"s", "z"}};
    case CellState::State::missing: return json{{"s", "m"}};
  }
  return json{{"s", "m"}};
}

std::string to_string(SliceMode::Kind kind) {
  switch (kind) {
    case SliceMode::Kind::by_layer: return "by_layer";
    case SliceMode::Kind::by_head: return "by_head";
    case SliceMode::Kind::rug: return "rug";
  }
  return "rug";
}

SliceMode::Kind slice_kind_from_string(const std::string& s) {
  if (s == "by_layer") return SliceMode::Kind::by_layer;
  if (s == "by_head") return SliceMode::Kind::by_head;
  if (s == "rug") return SliceMode::Kind::rug;
  throw InvalidArgument("unknown slice mode '" + s + "' (expected by_layer, by_head or rug)");
}

json slice_to_json(const AttentionSlice& slice, const SliceMode& mode, json rows) {
  json cells = json::array();
  for (std::size_t r = 0; r < slice.rows; ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < slice.columns.size(); ++c) row.push_back(cell_to_json(slice.at(r, c)));
    cells.push_back(std::move(row));
  }
  json out{{"query", slice.query}, {"mode", to_string(mode.kind)}, {"cells", std::move(cells)},
           {"rows", std::move(rows)}, {"cols", slice.columns}};
  if (mode.kind != SliceMode::Kind::by_layer) out["layer"] = mode.layer;
  if (mode.kind != SliceMode::Kind::by_head) out["head"] = mode.head;
  return out;
}

}  // namespace scorelens::attention
