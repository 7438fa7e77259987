#include "scorelens/scoring/reference_model.hpp"

#include <cmath>
#include <algorithm>
#include <random>
#include <span>

#include "scorelens/error.hpp"
#include "scorelens/kernels/kernels.hpp"
#include "scorelens/scoring/attention_mask.hpp"

namespace scorelens::scoring {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// [0, 1) from the top 53 bits
double unit(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

class ParamStream {
 public:
  explicit ParamStream(std::uint64_t seed) : gen_(seed) {}

  double uniform(double limit) { return (2.0 * unit(gen_()) - 1.0) * limit; }

  std::vector<double> matrix(std::size_t rows, std::size_t cols) {
    const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
    std::vector<double> m(rows * cols);
    for (auto& v : m) v = uniform(limit);
    return m;
  }

  std::vector<double> around(std::size_t n, double center, double spread) {
    std::vector<double> v(n);
    for (auto& x : v) x = center + uniform(spread);
    return v;
  }

 private:
  std::mt19937_64 gen_;
};

double gelu(double x) {
  constexpr double k = 0.7978845608028654;  // sqrt(2/pi)
  return 0.5 * x * (1.0 + std::tanh(k * (x + 0.044715 * x * x * x)));
}

void layer_norm(std::span<double> x, const std::vector<double>& gain, const std::vector<double>& bias) {
  const double d = static_cast<double>(x.size());
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= d;
  double var = 0.0;
  for (double v : x) var += (v - mean) * (v - mean);
  var /= d;
  const double inv = 1.0 / std::sqrt(var + ReferenceWeights::kLayerNormEps);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = (x[i] - mean) * inv * gain[i] + bias[i];
}

}  // namespace

ReferenceWeights ReferenceWeights::generate(const ModelConfig& config) {
  config.validate();
  ReferenceWeights w;
  w.embed_dim = config.embed_dim;
  w.ff_dim = 2 * config.embed_dim;
  w.heads = config.heads;
  w.seed = config.seed;
  const std::size_t d = w.embed_dim;
  ParamStream p(config.seed);
  w.layers.resize(config.layers);
  for (auto& l : w.layers) {
    l.wq = p.matrix(d, d);
    l.wk = p.matrix(d, d);
    l.wv = p.matrix(d, d);
    l.wo = p.matrix(d, d);
    l.ln1_gain = p.around(d, 1.0, 0.1);
    l.ln1_bias = p.around(d, 0.0, 0.1);
    l.w1 = p.matrix(w.ff_dim, d);
    l.b1 = p.around(w.ff_dim, 0.0, 0.1);
    l.w2 = p.matrix(d, w.ff_dim);
    l.b2 = p.around(d, 0.0, 0.1);
    l.ln2_gain = p.around(d, 1.0, 0.1);
    l.ln2_bias = p.around(d, 0.0, 0.1);
  }
  w.head_weight = p.around(d, 0.0, 1.0 / std::sqrt(static_cast<double>(d)));
  w.head_bias = p.uniform(0.1);
  return w;
}

double ReferenceWeights::embedding(std::int32_t token, std::size_t dim) const {
  const auto h = splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(token) * 0x100000001b3ULL + dim));
  return 2.0 * unit(h) - 1.0;
}

double ReferenceWeights::position_encoding(std::size_t pos, std::size_t dim, std::size_t embed_dim) {
  const double i2 = static_cast<double>(dim - dim % 2);
  const double angle = static_cast<double>(pos) / std::pow(10000.0, i2 / static_cast<double>(embed_dim));
  return dim % 2 == 0 ? std::sin(angle) : std::cos(angle);
}

ReferenceModel::ReferenceModel(ModelConfig config) : config_(std::move(config)) {
  if (config_.kind != ModelKind::reference) throw InvalidArgument("model '" + config_.model_id + "' is not a reference model");
  weights_ = ReferenceWeights::generate(config_);
}

ForwardOutput ReferenceModel::forward(const ModelInput& input, bool capture_attention) const {
  const std::size_t n = input.size();
  const std::size_t d = weights_.embed_dim;
  const std::size_t heads = config_.heads;
  const std::size_t dh = d / heads;
  const std::size_t ff = weights_.ff_dim;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  if (n == 0 || n > config_.max_len) throw InvalidArgument("input length outside model limits");

  const auto& k = kernels::active();
  const MaskSpec mask = build_attention_mask(input, config_);

  std::vector<double> x(n * d);
  for (std::size_t t = 0; t < n; ++t)
    for (std::size_t j = 0; j < d; ++j)
      x[t * d + j] = weights_.embedding(input.tokens[t], j) + ReferenceWeights::position_encoding(t, j, d);

  std::vector<std::vector<std::uint32_t>> keys(n);
  for (std::size_t q = 0; q < n; ++q) keys[q] = mask.keys(q);

  attention::RawAttention raw;
  if (capture_attention) raw = attention::RawAttention(n, config_.layers, heads);

  std::vector<double> qm(n * d), km(n * d), vm(n * d), ctx(n * d), proj(d), hidden(ff), ffo(d);
  std::vector<double> logits;

  for (std::size_t li = 0; li < weights_.layers.size(); ++li) {
    const auto& L = weights_.layers[li];
    for (std::size_t t = 0; t < n; ++t) {
      const double* xt = x.data() + t * d;
      k.matvec(L.wq.data(), d, d, xt, qm.data() + t * d);
      k.matvec(L.wk.data(), d, d, xt, km.data() + t * d);
      k.matvec(L.wv.data(), d, d, xt, vm.data() + t * d);
    }
    std::fill(ctx.begin(), ctx.end(), 0.0);
    for (std::size_t h = 0; h < heads; ++h) {
      const std::size_t off = h * dh;
      for (std::size_t q = 0; q < n; ++q) {
        const auto& ks = keys[q];
        logits.resize(ks.size());
        double mx = -INFINITY;
        for (std::size_t i = 0; i < ks.size(); ++i) {
          logits[i] = k.dot(qm.data() + q * d + off, km.data() + ks[i] * d + off, dh) * scale;
          mx = std::max(mx, logits[i]);
        }
        double sum = 0.0;
        for (auto& v : logits) {
          v = std::exp(v - mx);
          sum += v;
        }
        double* cq = ctx.data() + q * d + off;
        auto* row = capture_attention ? &raw.row(li, h, q) : nullptr;
        if (row) row->reserve(ks.size());
        for (std::size_t i = 0; i < ks.size(); ++i) {
          const double p = logits[i] / sum;
          k.axpy(p, vm.data() + ks[i] * d + off, cq, dh);
          if (row) row->emplace_back(ks[i], static_cast<float>(p));
        }
      }
    }
    for (std::size_t t = 0; t < n; ++t) {
      double* xt = x.data() + t * d;
      k.matvec(L.wo.data(), d, d, ctx.data() + t * d, proj.data());
      for (std::size_t j = 0; j < d; ++j) xt[j] += proj[j];
      layer_norm({xt, d}, L.ln1_gain, L.ln1_bias);

      k.matvec(L.w1.data(), ff, d, xt, hidden.data());
      for (std::size_t j = 0; j < ff; ++j) hidden[j] = gelu(hidden[j] + L.b1[j]);
      k.matvec(L.w2.data(), d, ff, hidden.data(), ffo.data());
      for (std::size_t j = 0; j < d; ++j) xt[j] += ffo[j] + L.b2[j];
      layer_norm({xt, d}, L.ln2_gain, L.ln2_bias);
    }
  }

  ForwardOutput out;
  out.score = k.dot(weights_.head_weight.data(), x.data(), d) + weights_.head_bias;
  if (capture_attention) out.attention = attention::ingest_attention(raw, config_.layers, heads, mask);
  return out;
}

std::pair<double, attention::AttentionTensor> reference_forward(const ModelInput& input, const ModelConfig& config) {
  const ReferenceModel model(config);
  auto out = model.forward(input, true);
  return {out.score, std::move(*out.attention)};
}

}  // namespace scorelens::scoring
