#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace spt {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

enum class Arch { encoder, decoder };

std::string_view to_string(Arch arch);
Arch parse_arch(std::string_view s);

struct ModelConfig {
  Arch arch = Arch::encoder;
  int layers = 4;
  int heads = 4;
  int model_dim = 128;
  int ff_dim = 512;
  int max_positions = 512;
  int vocab_size = 0;
  double dropout = 0.1;
  std::uint64_t seed = 1;
  /// Logits from the transposed token embedding instead of a separate
  /// output matrix (output.weight is then an empty tensor).
  bool tie_embeddings = false;

  int head_dim() const { return model_dim / heads; }
  /// Throws ContractError describing the first invalid field.
  void validate() const;
  bool operator==(const ModelConfig&) const = default;
};

template <typename Scalar>
struct LayerParams {
  Matrix<Scalar> attn_norm_gain, attn_norm_bias;
  Matrix<Scalar> wq, bq, wk, bk, wv, bv, wo, bo;
  Matrix<Scalar> ff_norm_gain, ff_norm_bias;
  Matrix<Scalar> w1, b1, w2, b2;
};

/// All trainable tensors. Vectors are stored as 1 x n matrices so every
/// tensor can be visited uniformly.
template <typename Scalar>
struct Parameters {
  Matrix<Scalar> token_embedding;     // vocab x dim
  Matrix<Scalar> position_embedding;  // max_positions x dim
  std::vector<LayerParams<Scalar>> layers;
  Matrix<Scalar> final_norm_gain, final_norm_bias;
  Matrix<Scalar> output_weight;  // dim x vocab, or empty when tied
  Matrix<Scalar> output_bias;
};

/// Calls f(name, tensor) for every tensor in a fixed order.
template <typename P, typename F>
void visit_tensors(P& p, F&& f) {
  f("embed.token", p.token_embedding);
  f("embed.position", p.position_embedding);
  for (std::size_t l = 0; l < p.layers.size(); ++l) {
    auto& L = p.layers[l];
    const std::string pre = "layer" + std::to_string(l) + ".";
    f(pre + "attn_norm.gain", L.attn_norm_gain);
    f(pre + "attn_norm.bias", L.attn_norm_bias);
    f(pre + "attn.wq", L.wq);
    f(pre + "attn.bq", L.bq);
    f(pre + "attn.wk", L.wk);
    f(pre + "attn.bk", L.bk);
    f(pre + "attn.wv", L.wv);
    f(pre + "attn.bv", L.bv);
    f(pre + "attn.wo", L.wo);
    f(pre + "attn.bo", L.bo);
    f(pre + "ff_norm.gain", L.ff_norm_gain);
    f(pre + "ff_norm.bias", L.ff_norm_bias);
    f(pre + "ff.w1", L.w1);
    f(pre + "ff.b1", L.b1);
    f(pre + "ff.w2", L.w2);
    f(pre + "ff.b2", L.b2);
  }
  f("final_norm.gain", p.final_norm_gain);
  f("final_norm.bias", p.final_norm_bias);
  f("output.weight", p.output_weight);
  f("output.bias", p.output_bias);
}

/// Pairwise visit over two parameter sets of identical layout.
template <typename P, typename Q, typename F>
void visit_tensors(P& a, Q& b, F&& f) {
  std::vector<std::pair<std::string, decltype(&a.token_embedding)>> lhs;
  visit_tensors(a, [&](const std::string& n, auto& t) { lhs.emplace_back(n, &t); });
  std::size_t i = 0;
  visit_tensors(b, [&](const std::string&, auto& t) {
    f(lhs[i].first, *lhs[i].second, t);
    ++i;
  });
}

/// Zero-filled tensors with the shapes implied by config.
template <typename Scalar>
Parameters<Scalar> zero_parameters(const ModelConfig& config);

/// Normal(0, 0.02) weights and embeddings, zero biases, unit norm gains.
template <typename Scalar>
Parameters<Scalar> init_parameters(const ModelConfig& config, std::uint64_t seed);

template <typename To, typename From>
Parameters<To> cast_parameters(const Parameters<From>& p) {
  Parameters<To> out;
  out.layers.resize(p.layers.size());
  visit_tensors(out, p, [](const std::string&, Matrix<To>& dst, const Matrix<From>& src) {
    dst = src.template cast<To>();
  });
  return out;
}

template <typename Scalar>
void set_zero(Parameters<Scalar>& p) {
  visit_tensors(p, [](const std::string&, Matrix<Scalar>& t) { t.setZero(); });
}

template <typename Scalar>
struct LayerCache {
  Matrix<Scalar> input;  // residual stream entering the layer
  Matrix<Scalar> attn_xhat, attn_in;
  Vector<Scalar> attn_rstd;
  Matrix<Scalar> q, k, v;
  std::vector<Matrix<Scalar>> probs;  // one T x T matrix per head
  Matrix<Scalar> context;             // concatenated head outputs
  Matrix<Scalar> attn_drop;
  Matrix<Scalar> mid;  // residual stream after attention
  Matrix<Scalar> ff_xhat, ff_in;
  Vector<Scalar> ff_rstd;
  Matrix<Scalar> ff_pre, ff_act;
  Matrix<Scalar> ff_drop;
};

template <typename Scalar>
struct ForwardCache {
  std::vector<int> ids;
  Matrix<Scalar> embed_drop;
  std::vector<LayerCache<Scalar>> layers;
  Matrix<Scalar> final_input, final_xhat, final_out;
  Vector<Scalar> final_rstd;
};

/// Dropout source for training-mode forward passes.
struct Dropout {
  double rate = 0.0;
  std::mt19937_64* rng = nullptr;
};

/// Deliberate gradient bugs for exercising the gradient checker.
enum class GradFault { none, flip_gelu_derivative, flip_attention_softmax };

/// Logits (positions x vocab). Encoder mode attends bidirectionally,
/// decoder mode applies a strict causal mask. `cache` receives what
/// backward needs; `dropout` null means evaluation mode.
template <typename Scalar>
Matrix<Scalar> forward(const ModelConfig& config, const Parameters<Scalar>& params,
                       std::span<const int> ids, ForwardCache<Scalar>* cache = nullptr,
                       const Dropout* dropout = nullptr);

/// Accumulates parameter gradients of sum(dlogits . logits) into `grads`.
template <typename Scalar>
void backward(const ModelConfig& config, const Parameters<Scalar>& params,
              const ForwardCache<Scalar>& cache, const Matrix<Scalar>& dlogits,
              Parameters<Scalar>& grads, GradFault fault = GradFault::none);

/// Adam moments for decoupled-weight-decay updates.
struct OptimizerState {
  Parameters<float> first_moment;
  Parameters<float> second_moment;
  long step = 0;
};

struct ModelBundle {
  ModelConfig config;
  Parameters<float> params;
  OptimizerState optimizer;

  static ModelBundle create(const ModelConfig& config);
};

template <typename Derived>
typename Derived::Scalar log_sum_exp(const Eigen::MatrixBase<Derived>& row) {
  using std::exp;
  using std::log;
  const auto m = row.maxCoeff();
  return m + log((row.array() - m).exp().sum());
}

}  // namespace spt
