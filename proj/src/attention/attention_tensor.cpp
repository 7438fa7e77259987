#include "scorelens/attention/attention_tensor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "scorelens/error.hpp"

namespace scorelens::attention {

namespace {

constexpr float kMissing = std::numeric_limits<float>::quiet_NaN();

void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidArgument(what);
}

}  // namespace

RawAttention::RawAttention(std::size_t n_, std::size_t layers_, std::size_t heads_)
    : n(n_), layers(layers_), heads(heads_), rows(n_ * layers_ * heads_) {}

RawAttention RawAttention::from_dense(std::size_t n, std::size_t layers, std::size_t heads,
                                      const std::vector<float>& dense) {
  require(dense.size() == n * n * layers * heads, "dense attention has wrong size");
  RawAttention raw(n, layers, heads);
  for (std::size_t l = 0; l < layers; ++l)
    for (std::size_t h = 0; h < heads; ++h)
      for (std::size_t q = 0; q < n; ++q) {
        const float* row = dense.data() + ((l * heads + h) * n + q) * n;
        for (std::size_t k = 0; k < n; ++k)
          if (row[k] != 0.0f && !std::isnan(row[k])) raw.row(l, h, q).emplace_back(static_cast<std::uint32_t>(k), row[k]);
      }
  return raw;
}

AttentionTensor::AttentionTensor(std::size_t n, std::size_t layers, std::size_t heads, std::size_t window,
                                 std::vector<std::uint32_t> global_indices, std::vector<float> band,
                                 std::vector<float> global_rows, std::vector<float> global_cols)
    : n_(n),
      layers_(layers),
      heads_(heads),
      window_(window),
      global_indices_(std::move(global_indices)),
      global_slot_(n, -1),
      band_(std::move(band)),
      global_rows_(std::move(global_rows)),
      global_cols_(std::move(global_cols)) {
  require(layers_ >= 1 && heads_ >= 1, "attention tensor needs at least one layer and head");
  require(window_ >= 2 && window_ % 2 == 0, "attention window must be even and >= 2");
  for (std::size_t i = 0; i < global_indices_.size(); ++i) {
    const auto g = global_indices_[i];
    require(g < n_, "global index out of range");
    require(i == 0 || global_indices_[i - 1] < g, "global indices must be strictly increasing");
    global_slot_[g] = static_cast<std::int32_t>(i);
  }
  const std::size_t g = global_indices_.size();
  require(band_.size() == layers_ * heads_ * n_ * band_width(), "band block has wrong size");
  require(global_rows_.size() == layers_ * heads_ * g * n_, "global_rows block has wrong size");
  require(global_cols_.size() == layers_ * heads_ * n_ * g, "global_cols block has wrong size");
}

CellState AttentionTensor::cell(std::size_t l, std::size_t h, std::size_t q, std::size_t k) const {
  const std::size_t g = global_indices_.size();
  const std::size_t lh = l * heads_ + h;
  if (const auto gq = global_slot_[q]; gq >= 0) {
    return CellState::from_weight(global_rows_[(lh * g + static_cast<std::size_t>(gq)) * n_ + k]);
  }
  if (const auto gk = global_slot_[k]; gk >= 0) {
    return CellState::from_weight(global_cols_[(lh * n_ + q) * g + static_cast<std::size_t>(gk)]);
  }
  const std::size_t hw = half_window();
  const std::size_t dist = q > k ? q - k : k - q;
  if (dist > hw) return CellState::missing();
  const float v = band_[band_index(l, h, q, k + hw - q)];
  return std::isnan(v) ? CellState::missing() : CellState::from_weight(v);
}

double AttentionTensor::row_sum(std::size_t l, std::size_t h, std::size_t q) const {
  const std::size_t g = global_indices_.size();
  const std::size_t lh = l * heads_ + h;
  double sum = 0.0;
  if (const auto gq = global_slot_[q]; gq >= 0) {
    const float* row = global_rows_.data() + (lh * g + static_cast<std::size_t>(gq)) * n_;
    for (std::size_t k = 0; k < n_; ++k) sum += row[k];
    return sum;
  }
  const float* band = band_.data() + band_index(l, h, q, 0);
  for (std::size_t o = 0; o < band_width(); ++o)
    if (!std::isnan(band[o])) sum += band[o];
  const float* cols = global_cols_.data() + (lh * n_ + q) * g;
  for (std::size_t i = 0; i < g; ++i) sum += cols[i];
  return sum;
}

std::optional<std::string> AttentionTensor::check_invariants(double tolerance) const {
  auto in_range = [](float v) { return std::isfinite(v) && v >= 0.0f && v <= 1.0f; };
  for (float v : band_)
    if (!std::isnan(v) && !in_range(v)) return "band weight outside [0,1]";
  for (float v : global_rows_)
    if (!in_range(v)) return "global_rows weight outside [0,1]";
  for (float v : global_cols_)
    if (!in_range(v)) return "global_cols weight outside [0,1]";
  for (std::size_t l = 0; l < layers_; ++l)
    for (std::size_t h = 0; h < heads_; ++h)
      for (std::size_t q = 0; q < n_; ++q) {
        const double s = row_sum(l, h, q);
        if (std::abs(s - 1.0) > tolerance) {
          std::ostringstream os;
          os << "row (" << l << "," << h << "," << q << ") sums to " << s;
          return os.str();
        }
      }
  return std::nullopt;
}

bool operator==(const AttentionTensor& a, const AttentionTensor& b) {
  auto same = [](const std::vector<float>& x, const std::vector<float>& y) {
    if (x.size() != y.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (std::isnan(x[i]) != std::isnan(y[i])) return false;
      if (!std::isnan(x[i]) && x[i] != y[i]) return false;
    }
    return true;
  };
  return a.n_ == b.n_ && a.layers_ == b.layers_ && a.heads_ == b.heads_ && a.window_ == b.window_ &&
         a.global_indices_ == b.global_indices_ && same(a.band_, b.band_) && same(a.global_rows_, b.global_rows_) &&
         same(a.global_cols_, b.global_cols_);
}

AttentionTensor ingest_attention(const RawAttention& raw, std::size_t layers, std::size_t heads,
                                 const scoring::MaskSpec& mask) {
  const std::size_t n = mask.n();
  require(raw.n == n, "raw attention token count does not match mask");
  require(raw.layers == layers && raw.heads == heads, "raw attention layer/head count mismatch");

  const auto& globals = mask.global_indices();
  const std::size_t g = globals.size();
  const std::size_t w = mask.window();
  const std::size_t hw = mask.half_window();
  const std::size_t bw = w + 1;

  std::vector<std::int32_t> slot(n, -1);
  for (std::size_t i = 0; i < g; ++i) slot[globals[i]] = static_cast<std::int32_t>(i);

  std::vector<float> band(layers * heads * n * bw, kMissing);
  std::vector<float> global_rows(layers * heads * g * n, 0.0f);
  std::vector<float> global_cols(layers * heads * n * g, 0.0f);

  for (std::size_t l = 0; l < layers; ++l) {
    for (std::size_t h = 0; h < heads; ++h) {
      const std::size_t lh = l * heads + h;
      for (std::size_t q = 0; q < n; ++q) {
        float* brow = band.data() + (lh * n + q) * bw;
        if (slot[q] < 0) {
          // permitted, non-global in-window keys start at 0.0
          const std::size_t lo = q >= hw ? q - hw : 0;
          const std::size_t hi = std::min(n - 1, q + hw);
          for (std::size_t k = lo; k <= hi; ++k)
            if (slot[k] < 0) brow[k + hw - q] = 0.0f;
        }
        for (const auto& [k, weight] : raw.row(l, h, q)) {
          if (k >= n || !mask.permits(q, k)) {
            std::ostringstream os;
            os << "mask violation at (" << l << "," << h << "," << q << "," << k << ")";
            throw InvalidArgument(os.str());
          }
          if (!std::isfinite(weight) || weight < 0.0f || weight > 1.0f) {
            std::ostringstream os;
            os << "attention weight outside [0,1] at (" << l << "," << h << "," << q << "," << k << ")";
            throw InvalidArgument(os.str());
          }
          if (slot[q] >= 0) {
            global_rows[(lh * g + static_cast<std::size_t>(slot[q])) * n + k] = weight;
          }
          if (slot[k] >= 0) {
            global_cols[(lh * n + q) * g + static_cast<std::size_t>(slot[k])] = weight;
          } else if (slot[q] < 0) {
            brow[k + hw - q] = weight;
          }
        }
      }
    }
  }
  return AttentionTensor(n, layers, heads, w, globals, std::move(band), std::move(global_rows),
                         std::move(global_cols));
}

CellState classify_cell(const AttentionTensor& tensor, std::size_t layer, std::size_t head, std::size_t query,
                        std::size_t key) {
  if (layer >= tensor.layers() || head >= tensor.heads() || query >= tensor.n() || key >= tensor.n()) {
    throw InvalidArgument("attention index out of range");
  }
  return tensor.cell(layer, head, query, key);
}

AttentionSlice slice_attention(const AttentionTensor& tensor, std::size_t query, const SliceMode& mode) {
  if (query >= tensor.n()) throw InvalidArgument("token index out of range");
  AttentionSlice out;
  out.query = query;
  out.rows = tensor.n();
  switch (mode.kind) {
    case SliceMode::Kind::by_layer:
      if (mode.head >= tensor.heads()) throw InvalidArgument("head index out of range");
      for (std::size_t l = 0; l < tensor.layers(); ++l) out.columns.push_back(l);
      break;
    case SliceMode::Kind::by_head:
      if (mode.layer >= tensor.layers()) throw InvalidArgument("layer index out of range");
      for (std::size_t h = 0; h < tensor.heads(); ++h) out.columns.push_back(h);
      break;
    case SliceMode::Kind::rug:
      if (mode.layer >= tensor.layers()) throw InvalidArgument("layer index out of range");
      if (mode.head >= tensor.heads()) throw InvalidArgument("head index out of range");
      out.columns.push_back(mode.head);
      break;
  }
  out.cells.reserve(out.rows * out.columns.size());
  for (std::size_t k = 0; k < tensor.n(); ++k) {
    for (const auto c : out.columns) {
      switch (mode.kind) {
        case SliceMode::Kind::by_layer: out.cells.push_back(tensor.cell(c, mode.head, query, k)); break;
        case SliceMode::Kind::by_head: out.cells.push_back(tensor.cell(mode.layer, c, query, k)); break;
        case SliceMode::Kind::rug: out.cells.push_back(tensor.cell(mode.layer, mode.head, query, k)); break;
      }
    }
  }
  return out;
}

std::uint64_t storage_cells(std::uint64_t n, std::uint64_t window, std::uint64_t layers, std::uint64_t heads,
                            StorageMode mode) {
  if (n == 0 || layers == 0 || heads == 0) throw InvalidArgument("storage_cells needs positive arguments");
  if (mode == StorageMode::full_global) return n * n * layers * heads;
  if (window == 0) throw InvalidArgument("storage_cells needs a positive window");
  return n * window * layers * heads;
}

}  // namespace scorelens::attention
