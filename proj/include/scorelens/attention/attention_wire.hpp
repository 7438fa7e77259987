#pragma once

#include <string>

#include "json.hpp"

#include "scorelens/attention/attention_tensor.hpp"

namespace scorelens::attention {

// Wire form of a tensor. Blocks are flattened over (layer, head) in
// layer-major order, so "band" is [L*H][n][w+1], "global_rows" [L*H][g][n]
// and "global_cols" [L*H][n][g]. Missing band cells are JSON null.
nlohmann::json tensor_to_json(const AttentionTensor& tensor);

/// Decodes and validates a wire tensor for an n-token sequence. Throws
/// SchemaError naming the offending field, e.g. "attention.window".
AttentionTensor tensor_from_json(const nlohmann::json& j, std::size_t n, const std::string& field = "attention");

nlohmann::json cell_to_json(const CellState& cell);

/// {"cells": [[...]], "rows": rows, "cols": [...], "query": q, "mode": ...}
nlohmann::json slice_to_json(const AttentionSlice& slice, const SliceMode& mode, nlohmann::json rows);

std::string to_string(SliceMode::Kind kind);
SliceMode::Kind slice_kind_from_string(const std::string& s);  // throws InvalidArgument

}  // namespace scorelens::attention
