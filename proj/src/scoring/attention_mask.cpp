#include "scorelens/scoring/attention_mask.hpp"

#include <algorithm>

#include "scorelens/error.hpp"
#include "scorelens/scoring/model_config.hpp"
#include "scorelens/scoring/model_input.hpp"

namespace scorelens::scoring {

MaskSpec::MaskSpec(std::size_t n, std::size_t window, std::vector<bool> global_flags)
    : n_(n), window_(window), global_(std::move(global_flags)) {
  if (global_.size() != n_) throw InvalidArgument("global flag count does not match sequence length");
  if (window_ < 2 || window_ % 2 != 0) throw InvalidArgument("window must be even and >= 2");
  for (std::size_t i = 0; i < n_; ++i)
    if (global_[i]) global_indices_.push_back(static_cast<std::uint32_t>(i));
}

bool MaskSpec::permits(std::size_t q, std::size_t k) const {
  if (q >= n_ || k >= n_) return false;
  if (global_[q] || global_[k]) return true;
  const std::size_t dist = q > k ? q - k : k - q;
  return dist <= half_window();
}

std::vector<std::uint32_t> MaskSpec::keys(std::size_t q) const {
  std::vector<std::uint32_t> out;
  if (global_[q]) {
    out.resize(n_);
    for (std::size_t k = 0; k < n_; ++k) out[k] = static_cast<std::uint32_t>(k);
    return out;
  }
  const std::size_t hw = half_window();
  const std::size_t lo = q >= hw ? q - hw : 0;
  const std::size_t hi = std::min(n_ - 1, q + hw);
  out.reserve(hi - lo + 1 + global_indices_.size());
  // merge the window with global positions, keeping ascending order
  auto g = global_indices_.begin();
  for (; g != global_indices_.end() && *g < lo; ++g) out.push_back(*g);
  for (std::size_t k = lo; k <= hi; ++k) out.push_back(static_cast<std::uint32_t>(k));
  for (; g != global_indices_.end(); ++g)
    if (*g > hi) out.push_back(*g);
  return out;
}

MaskSpec build_attention_mask(const ModelInput& input, const ModelConfig& config) {
  return MaskSpec(input.size(), config.window, input.global_flags);
}

}  // namespace scorelens::scoring
