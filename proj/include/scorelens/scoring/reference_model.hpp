#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "scorelens/attention/attention_tensor.hpp"
#include "scorelens/scoring/model_config.hpp"
#include "scorelens/scoring/model_input.hpp"

namespace scorelens::scoring {

/// Seeded parameters of the reference encoder. All matrices are row-major
/// (out x in). Token embeddings are not stored: they are hashed on demand
/// from (seed, token id, dimension).
struct ReferenceWeights {
  struct Layer {
    std::vector<double> wq, wk, wv, wo;  // d x d
    std::vector<double> ln1_gain, ln1_bias;
    std::vector<double> w1, b1;  // ff x d, ff
    std::vector<double> w2, b2;  // d x ff, d
    std::vector<double> ln2_gain, ln2_bias;
  };

  std::size_t embed_dim = 0;
  std::size_t ff_dim = 0;
  std::size_t heads = 0;
  std::uint64_t seed = 0;
  std::vector<Layer> layers;
  std::vector<double> head_weight;  // d
  double head_bias = 0.0;

  static constexpr double kLayerNormEps = 1e-5;

  static ReferenceWeights generate(const ModelConfig& config);

  double embedding(std::int32_t token, std::size_t dim) const;
  static double position_encoding(std::size_t pos, std::size_t dim, std::size_t embed_dim);
};

struct ForwardOutput {
  double score = 0.0;
  std::optional<attention::AttentionTensor> attention;
};

/// Small post-LN transformer encoder with Longformer masking: hashed
/// embeddings + sinusoidal positions, per-layer masked multi-head attention,
/// residual + layer norm, GELU feed-forward, residual + layer norm, and a
/// linear head on the BEGIN token. Immutable after construction.
class ReferenceModel {
 public:
  explicit ReferenceModel(ModelConfig config);

  const ModelConfig& config() const { return config_; }
  const ReferenceWeights& weights() const { return weights_; }

  ForwardOutput forward(const ModelInput& input, bool capture_attention) const;

 private:
  ModelConfig config_;
  ReferenceWeights weights_;
};

/// Score and captured attention for one input.
std::pair<double, attention::AttentionTensor> reference_forward(const ModelInput& input, const ModelConfig& config);

}  // namespace scorelens::scoring
