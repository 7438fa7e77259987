#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "scorelens/scoring/attention_mask.hpp"

namespace scorelens::attention {

/// What a (layer, head, query, key) cell holds. `zero` means a stored weight
/// of exactly 0.0; `missing` means the mask never allowed the pair.
struct CellState {
  enum class State { weight, zero, missing };

  State state = State::missing;
  float value = 0.0f;

  static CellState missing() { return {State::missing, 0.0f}; }
  static CellState from_weight(float w) { return w == 0.0f ? CellState{State::zero, 0.0f} : CellState{State::weight, w}; }

  bool present() const { return state != State::missing; }
  friend bool operator==(const CellState&, const CellState&) = default;
};

/// Scorer output before packing: one sparse row of (key, weight) per
/// (layer, head, query). Keys not listed in a row hold no weight.
struct RawAttention {
  std::size_t n = 0;
  std::size_t layers = 0;
  std::size_t heads = 0;
  std::vector<std::vector<std::pair<std::uint32_t, float>>> rows;  // index (l * heads + h) * n + q

  RawAttention() = default;
  RawAttention(std::size_t n, std::size_t layers, std::size_t heads);

  auto& row(std::size_t l, std::size_t h, std::size_t q) { return rows[(l * heads + h) * n + q]; }
  const auto& row(std::size_t l, std::size_t h, std::size_t q) const { return rows[(l * heads + h) * n + q]; }

  /// From dense per-(layer, head) n x n matrices, layer-major; nonzero cells
  /// become entries.
  static RawAttention from_dense(std::size_t n, std::size_t layers, std::size_t heads, const std::vector<float>& dense);
};

/// Windowed sparse attention storage.
///
///   band        [L][H][n][w+1]  key offsets -w/2..+w/2 around each query
///   global_rows [L][H][g][n]    rows of global queries (every key)
///   global_cols [L][H][n][g]    every query's weight on each global key
///
/// Missing band cells hold NaN. A key that is both in-window and global is
/// stored only in the global blocks (band cell missing); the row of a global
/// query lives only in global_rows.
class AttentionTensor {
 public:
  AttentionTensor(std::size_t n, std::size_t layers, std::size_t heads, std::size_t window,
                  std::vector<std::uint32_t> global_indices, std::vector<float> band, std::vector<float> global_rows,
                  std::vector<float> global_cols);

  std::size_t n() const { return n_; }
  std::size_t layers() const { return layers_; }
  std::size_t heads() const { return heads_; }
  std::size_t window() const { return window_; }
  std::size_t half_window() const { return window_ / 2; }
  std::size_t band_width() const { return window_ + 1; }
  const std::vector<std::uint32_t>& global_indices() const { return global_indices_; }
  bool is_global(std::size_t pos) const { return global_slot_[pos] >= 0; }

  const std::vector<float>& band() const { return band_; }
  const std::vector<float>& global_rows() const { return global_rows_; }
  const std::vector<float>& global_cols() const { return global_cols_; }

  /// Unchecked cell lookup; see classify_cell for the checked form.
  CellState cell(std::size_t l, std::size_t h, std::size_t q, std::size_t k) const;

  double row_sum(std::size_t l, std::size_t h, std::size_t q) const;

  /// Number of stored float cells across all blocks.
  std::size_t stored_cells() const { return band_.size() + global_rows_.size() + global_cols_.size(); }

  /// First broken invariant (weight range, row normalization), or nothing.
  std::optional<std::string> check_invariants(double tolerance = 1e-5) const;

  friend bool operator==(const AttentionTensor& a, const AttentionTensor& b);

 private:
  std::size_t band_index(std::size_t l, std::size_t h, std::size_t q, std::size_t offset) const {
    return ((l * heads_ + h) * n_ + q) * band_width() + offset;
  }

  std::size_t n_, layers_, heads_, window_;
  std::vector<std::uint32_t> global_indices_;
  std::vector<std::int32_t> global_slot_;
  std::vector<float> band_;
  std::vector<float> global_rows_;
  std::vector<float> global_cols_;
};

/// Packs raw scorer output into the windowed layout. Throws InvalidArgument
/// "mask violation at (l,h,q,k)" for any entry the mask forbids.
AttentionTensor ingest_attention(const RawAttention& raw, std::size_t layers, std::size_t heads,
                                 const scoring::MaskSpec& mask);

struct SliceMode {
  enum class Kind { by_layer, by_head, rug };
  Kind kind = Kind::rug;
  std::size_t layer = 0;  // by_head, rug
  std::size_t head = 0;   // by_layer, rug

  static SliceMode by_layer(std::size_t head) { return {Kind::by_layer, 0, head}; }
  static SliceMode by_head(std::size_t layer) { return {Kind::by_head, layer, 0}; }
  static SliceMode rug(std::size_t layer, std::size_t head) { return {Kind::rug, layer, head}; }
};

/// n rows (keys) x cols (layers, heads, or a single rug column), row-major.
struct AttentionSlice {
  std::size_t query = 0;
  std::size_t rows = 0;
  std::vector<std::size_t> columns;  // layer or head index per column
  std::vector<CellState> cells;

  const CellState& at(std::size_t row, std::size_t col) const { return cells[row * columns.size() + col]; }
};

AttentionSlice slice_attention(const AttentionTensor& tensor, std::size_t query, const SliceMode& mode);

CellState classify_cell(const AttentionTensor& tensor, std::size_t layer, std::size_t head, std::size_t query,
                        std::size_t key);

enum class StorageMode { windowed, full_global };

/// windowed: n*w*L*H; full_global: n*n*L*H (w ignored).
std::uint64_t storage_cells(std::uint64_t n, std::uint64_t window, std::uint64_t layers, std::uint64_t heads,
                            StorageMode mode);

}  // namespace scorelens::attention
