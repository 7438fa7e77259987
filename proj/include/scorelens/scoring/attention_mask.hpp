#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace scorelens::scoring {

struct ModelConfig;
struct ModelInput;

/// Longformer-style permission set: (q, k) is allowed iff |q - k| <= w/2, or
/// either endpoint is global.
class MaskSpec {
 public:
  MaskSpec(std::size_t n, std::size_t window, std::vector<bool> global_flags);

  std::size_t n() const { return n_; }
  std::size_t window() const { return window_; }
  std::size_t half_window() const { return window_ / 2; }

  bool is_global(std::size_t pos) const { return global_[pos]; }
  const std::vector<std::uint32_t>& global_indices() const { return global_indices_; }

  bool permits(std::size_t q, std::size_t k) const;

  /// Permitted keys for q in ascending order.
  std::vector<std::uint32_t> keys(std::size_t q) const;

 private:
  std::size_t n_;
  std::size_t window_;
  std::vector<bool> global_;
  std::vector<std::uint32_t> global_indices_;
};

MaskSpec build_attention_mask(const ModelInput& input, const ModelConfig& config);

}  // namespace scorelens::scoring
