#include "spt/model.hpp"

#include <cmath>
#include <limits>

#include "spt/error.hpp"

namespace spt {
namespace {

constexpr double kNormEps = 1e-5;

template <typename S>
Matrix<S> row_vector(int n, S value) {
  return Matrix<S>::Constant(1, n, value);
}

template <typename S>
void layer_norm(const Matrix<S>& x, const Matrix<S>& gain, const Matrix<S>& bias, Matrix<S>& xhat,
                Vector<S>& rstd, Matrix<S>& out) {
  const auto d = static_cast<S>(x.cols());
  Vector<S> mean = x.rowwise().sum() / d;
  xhat = x.colwise() - mean;
  Vector<S> var = xhat.array().square().rowwise().sum() / d;
  rstd = (var.array() + static_cast<S>(kNormEps)).rsqrt();
  xhat = xhat.array().colwise() * rstd.array();
  out = (xhat.array().rowwise() * gain.row(0).array()).rowwise() + bias.row(0).array();
}

template <typename S>
Matrix<S> layer_norm_backward(const Matrix<S>& dy, const Matrix<S>& xhat, const Vector<S>& rstd,
                              const Matrix<S>& gain, Matrix<S>& dgain, Matrix<S>& dbias) {
  const auto d = static_cast<S>(dy.cols());
  dgain += (dy.array() * xhat.array()).colwise().sum().matrix();
  dbias += dy.colwise().sum();
  Matrix<S> dxhat = dy.array().rowwise() * gain.row(0).array();
  Vector<S> mean_dxhat = dxhat.rowwise().sum() / d;
  Vector<S> mean_dxhat_xhat = (dxhat.array() * xhat.array()).rowwise().sum().matrix() / d;
  Matrix<S> dx = dxhat;
  dx.colwise() -= mean_dxhat;
  dx -= (xhat.array().colwise() * mean_dxhat_xhat.array()).matrix();
  return dx.array().colwise() * rstd.array();
}

template <typename S>
constexpr S gelu_c() {
  return static_cast<S>(0.7978845608028654);  // sqrt(2/pi)
}

template <typename S>
S gelu(S x) {
  using std::tanh;
  const S t = tanh(gelu_c<S>() * (x + S(0.044715) * x * x * x));
  return S(0.5) * x * (S(1) + t);
}

template <typename S>
S gelu_grad(S x) {
  using std::tanh;
  const S u = gelu_c<S>() * (x + S(0.044715) * x * x * x);
  const S t = tanh(u);
  const S du = gelu_c<S>() * (S(1) + S(3) * S(0.044715) * x * x);
  return S(0.5) * (S(1) + t) + S(0.5) * x * (S(1) - t * t) * du;
}

template <typename S>
Matrix<S> dropout_mask(int rows, int cols, const Dropout* dropout) {
  if (!dropout || dropout->rate <= 0.0 || !dropout->rng) return {};
  std::bernoulli_distribution keep(1.0 - dropout->rate);
  const S scale = static_cast<S>(1.0 / (1.0 - dropout->rate));
  Matrix<S> m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = keep(*dropout->rng) ? scale : S(0);
  return m;
}

template <typename S>
void apply_mask(Matrix<S>& x, const Matrix<S>& mask) {
  if (mask.size() != 0) x.array() *= mask.array();
}

}  // namespace

std::string_view to_string(Arch arch) { return arch == Arch::encoder ? "encoder" : "decoder"; }

Arch parse_arch(std::string_view s) {
  if (s == "encoder") return Arch::encoder;
  if (s == "decoder") return Arch::decoder;
  throw ContractError("unknown architecture '" + std::string(s) + "'");
}

void ModelConfig::validate() const {
  auto fail = [](const std::string& m) { throw ContractError("model config: " + m); };
  if (layers < 1) fail("layers must be >= 1");
  if (heads < 1) fail("heads must be >= 1");
  if (model_dim < 1 || model_dim % heads != 0) fail("model_dim must be a positive multiple of heads");
  if (ff_dim < 1) fail("ff_dim must be >= 1");
  if (max_positions < 1) fail("max_positions must be >= 1");
  if (vocab_size < 1) fail("vocab_size must be >= 1");
  if (!(dropout >= 0.0 && dropout < 1.0)) fail("dropout must be in [0, 1)");
}

template <typename S>
Parameters<S> zero_parameters(const ModelConfig& c) {
  Parameters<S> p;
  const int d = c.model_dim;
  p.token_embedding = Matrix<S>::Zero(c.vocab_size, d);
  p.position_embedding = Matrix<S>::Zero(c.max_positions, d);
  p.layers.resize(c.layers);
  for (auto& L : p.layers) {
    L.attn_norm_gain = Matrix<S>::Zero(1, d);
    L.attn_norm_bias = Matrix<S>::Zero(1, d);
    for (auto* w : {&L.wq, &L.wk, &L.wv, &L.wo}) *w = Matrix<S>::Zero(d, d);
    for (auto* b : {&L.bq, &L.bk, &L.bv, &L.bo}) *b = Matrix<S>::Zero(1, d);
    L.ff_norm_gain = Matrix<S>::Zero(1, d);
    L.ff_norm_bias = Matrix<S>::Zero(1, d);
    L.w1 = Matrix<S>::Zero(d, c.ff_dim);
    L.b1 = Matrix<S>::Zero(1, c.ff_dim);
    L.w2 = Matrix<S>::Zero(c.ff_dim, d);
    L.b2 = Matrix<S>::Zero(1, d);
  }
  p.final_norm_gain = Matrix<S>::Zero(1, d);
  p.final_norm_bias = Matrix<S>::Zero(1, d);
  p.output_weight = c.tie_embeddings ? Matrix<S>() : Matrix<S>::Zero(d, c.vocab_size);
  p.output_bias = Matrix<S>::Zero(1, c.vocab_size);
  return p;
}

template <typename S>
Parameters<S> init_parameters(const ModelConfig& c, std::uint64_t seed) {
  c.validate();
  Parameters<S> p = zero_parameters<S>(c);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 0.02);
  visit_tensors(p, [&](const std::string& name, Matrix<S>& t) {
    if (name.ends_with(".gain")) {
      t.setOnes();
    } else if (t.rows() > 1) {
      for (Eigen::Index i = 0; i < t.size(); ++i) t.data()[i] = static_cast<S>(normal(rng));
    }
  });
  return p;
}

template <typename S>
Matrix<S> forward(const ModelConfig& c, const Parameters<S>& p, std::span<const int> ids,
                  ForwardCache<S>* cache, const Dropout* dropout) {
  const int T = static_cast<int>(ids.size());
  if (T > c.max_positions) {
    throw ContractError("sequence of " + std::to_string(T) + " tokens exceeds max_positions " +
                        std::to_string(c.max_positions));
  }
  const int d = c.model_dim, H = c.heads, dh = c.head_dim();
  const bool causal = c.arch == Arch::decoder;
  const S scale = S(1) / std::sqrt(static_cast<S>(dh));

  Matrix<S> x(T, d);
  for (int t = 0; t < T; ++t) {
    if (ids[t] < 0 || ids[t] >= c.vocab_size) throw ContractError("token id out of range");
    x.row(t) = p.token_embedding.row(ids[t]) + p.position_embedding.row(t);
  }
  Matrix<S> embed_drop = dropout_mask<S>(T, d, dropout);
  apply_mask(x, embed_drop);

  ForwardCache<S> local;
  ForwardCache<S>& fc = cache ? *cache : local;
  fc.ids.assign(ids.begin(), ids.end());
  fc.embed_drop = std::move(embed_drop);
  fc.layers.resize(c.layers);

  for (int l = 0; l < c.layers; ++l) {
    const auto& L = p.layers[l];
    auto& lc = fc.layers[l];
    lc.input = x;
    layer_norm(x, L.attn_norm_gain, L.attn_norm_bias, lc.attn_xhat, lc.attn_rstd, lc.attn_in);
    lc.q = (lc.attn_in * L.wq).rowwise() + L.bq.row(0);
    lc.k = (lc.attn_in * L.wk).rowwise() + L.bk.row(0);
    lc.v = (lc.attn_in * L.wv).rowwise() + L.bv.row(0);
    lc.context.resize(T, d);
    lc.probs.resize(H);
    for (int h = 0; h < H; ++h) {
      Matrix<S> scores = (lc.q.middleCols(h * dh, dh) * lc.k.middleCols(h * dh, dh).transpose()) * scale;
      Matrix<S>& P = lc.probs[h];
      P.setZero(T, T);
      for (int i = 0; i < T; ++i) {
        const int width = causal ? i + 1 : T;
        auto row = scores.row(i).head(width);
        const S m = row.maxCoeff();
        auto e = (row.array() - m).exp();
        P.row(i).head(width) = e / e.sum();
      }
      lc.context.middleCols(h * dh, dh) = P * lc.v.middleCols(h * dh, dh);
    }
    Matrix<S> attn_out = (lc.context * L.wo).rowwise() + L.bo.row(0);
    lc.attn_drop = dropout_mask<S>(T, d, dropout);
    apply_mask(attn_out, lc.attn_drop);
    lc.mid = x + attn_out;

    layer_norm(lc.mid, L.ff_norm_gain, L.ff_norm_bias, lc.ff_xhat, lc.ff_rstd, lc.ff_in);
    lc.ff_pre = (lc.ff_in * L.w1).rowwise() + L.b1.row(0);
    lc.ff_act = lc.ff_pre.unaryExpr([](S v) { return gelu(v); });
    Matrix<S> ff_out = (lc.ff_act * L.w2).rowwise() + L.b2.row(0);
    lc.ff_drop = dropout_mask<S>(T, d, dropout);
    apply_mask(ff_out, lc.ff_drop);
    x = lc.mid + ff_out;
  }

  fc.final_input = x;
  layer_norm(x, p.final_norm_gain, p.final_norm_bias, fc.final_xhat, fc.final_rstd, fc.final_out);
  if (c.tie_embeddings) return (fc.final_out * p.token_embedding.transpose()).rowwise() + p.output_bias.row(0);
  return (fc.final_out * p.output_weight).rowwise() + p.output_bias.row(0);
}

template <typename S>
void backward(const ModelConfig& c, const Parameters<S>& p, const ForwardCache<S>& fc,
              const Matrix<S>& dlogits, Parameters<S>& g, GradFault fault) {
  const int T = static_cast<int>(fc.ids.size());
  const int d = c.model_dim, H = c.heads, dh = c.head_dim();
  const S scale = S(1) / std::sqrt(static_cast<S>(dh));

  g.output_bias += dlogits.colwise().sum();
  Matrix<S> dz;
  if (c.tie_embeddings) {
    g.token_embedding.noalias() += dlogits.transpose() * fc.final_out;
    dz = dlogits * p.token_embedding;
  } else {
    g.output_weight.noalias() += fc.final_out.transpose() * dlogits;
    dz = dlogits * p.output_weight.transpose();
  }
  Matrix<S> dx = layer_norm_backward(dz, fc.final_xhat, fc.final_rstd, p.final_norm_gain,
                                     g.final_norm_gain, g.final_norm_bias);

  for (int l = c.layers - 1; l >= 0; --l) {
    const auto& L = p.layers[l];
    auto& G = g.layers[l];
    const auto& lc = fc.layers[l];

    // feed-forward sublayer
    Matrix<S> dff = dx;
    apply_mask(dff, lc.ff_drop);
    G.w2.noalias() += lc.ff_act.transpose() * dff;
    G.b2 += dff.colwise().sum();
    Matrix<S> dact = dff * L.w2.transpose();
    Matrix<S> dpre = dact.array() * lc.ff_pre.unaryExpr([](S v) { return gelu_grad(v); }).array();
    if (fault == GradFault::flip_gelu_derivative) dpre = -dpre;
    G.w1.noalias() += lc.ff_in.transpose() * dpre;
    G.b1 += dpre.colwise().sum();
    Matrix<S> dffin = dpre * L.w1.transpose();
    Matrix<S> dmid = dx + layer_norm_backward(dffin, lc.ff_xhat, lc.ff_rstd, L.ff_norm_gain,
                                              G.ff_norm_gain, G.ff_norm_bias);

    // attention sublayer
    Matrix<S> dattn = dmid;
    apply_mask(dattn, lc.attn_drop);
    G.wo.noalias() += lc.context.transpose() * dattn;
    G.bo += dattn.colwise().sum();
    Matrix<S> dcontext = dattn * L.wo.transpose();
    Matrix<S> dq(T, d), dk(T, d), dv(T, d);
    for (int h = 0; h < H; ++h) {
      const Matrix<S>& P = lc.probs[h];
      auto dctx_h = dcontext.middleCols(h * dh, dh);
      dv.middleCols(h * dh, dh) = P.transpose() * dctx_h;
      Matrix<S> dP = dctx_h * lc.v.middleCols(h * dh, dh).transpose();
      Vector<S> rowdot = (dP.array() * P.array()).rowwise().sum();
      Matrix<S> dS = P.array() * (dP.colwise() - rowdot).array();
      if (fault == GradFault::flip_attention_softmax) dS = -dS;
      dq.middleCols(h * dh, dh) = (dS * lc.k.middleCols(h * dh, dh)) * scale;
      dk.middleCols(h * dh, dh) = (dS.transpose() * lc.q.middleCols(h * dh, dh)) * scale;
    }
    G.wq.noalias() += lc.attn_in.transpose() * dq;
    G.wk.noalias() += lc.attn_in.transpose() * dk;
    G.wv.noalias() += lc.attn_in.transpose() * dv;
    G.bq += dq.colwise().sum();
    G.bk += dk.colwise().sum();
    G.bv += dv.colwise().sum();
    Matrix<S> dain = dq * L.wq.transpose();
    dain.noalias() += dk * L.wk.transpose();
    dain.noalias() += dv * L.wv.transpose();
    dx = dmid + layer_norm_backward(dain, lc.attn_xhat, lc.attn_rstd, L.attn_norm_gain,
                                    G.attn_norm_gain, G.attn_norm_bias);
  }

  apply_mask(dx, fc.embed_drop);
  for (int t = 0; t < T; ++t) {
    g.token_embedding.row(fc.ids[t]) += dx.row(t);
    g.position_embedding.row(t) += dx.row(t);
  }
}

ModelBundle ModelBundle::create(const ModelConfig& config) {
  config.validate();
  ModelBundle b;
  b.config = config;
  b.params = init_parameters<float>(config, config.seed);
  b.optimizer.first_moment = zero_parameters<float>(config);
  b.optimizer.second_moment = zero_parameters<float>(config);
  return b;
}

#define SPT_INSTANTIATE(S)                                                                          \
  template Parameters<S> zero_parameters<S>(const ModelConfig&);                                   \
  template Parameters<S> init_parameters<S>(const ModelConfig&, std::uint64_t);                    \
  template Matrix<S> forward<S>(const ModelConfig&, const Parameters<S>&, std::span<const int>,    \
                                ForwardCache<S>*, const Dropout*);                                 \
  template void backward<S>(const ModelConfig&, const Parameters<S>&, const ForwardCache<S>&,      \
                            const Matrix<S>&, Parameters<S>&, GradFault);

SPT_INSTANTIATE(float)
SPT_INSTANTIATE(double)

#undef SPT_INSTANTIATE

}  // namespace spt
