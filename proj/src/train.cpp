#include "spt/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "spt/error.hpp"
#include "spt/predict.hpp"

namespace spt {
namespace {

constexpr double kBeta1 = 0.9;
constexpr double kBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;

bool decays(const std::string& name) {
  return !(name.ends_with(".gain") || name.ends_with(".bias") || name.ends_with(".bq") ||
           name.ends_with(".bk") || name.ends_with(".bv") || name.ends_with(".bo") ||
           name.ends_with(".b1") || name.ends_with(".b2"));
}

std::mt19937_64 epoch_rng(std::uint64_t seed, int epoch, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(epoch), static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

bool all_finite(const Parameters<float>& p) {
  bool ok = true;
  visit_tensors(p, [&](const std::string&, const Matrix<float>& t) { ok = ok && t.allFinite(); });
  return ok;
}

}  // namespace

std::string_view to_string(Schedule s) { return s == Schedule::linear_decay ? "linear_decay" : "constant"; }

Schedule parse_schedule(std::string_view s) {
  if (s == "linear_decay" || s == "linear") return Schedule::linear_decay;
  if (s == "constant") return Schedule::constant;
  throw ContractError("unknown schedule '" + std::string(s) + "'");
}

TrainConfig TrainConfig::fine_tune_preset() {
  TrainConfig c;
  c.batch_size = 8;
  c.learning_rate = 1e-5;
  c.epochs = 10;
  c.schedule = Schedule::linear_decay;
  return c;
}

void TrainConfig::validate() const {
  if (batch_size < 1) throw ContractError("train config: batch_size must be >= 1");
  if (!(learning_rate > 0)) throw ContractError("train config: learning_rate must be > 0");
  if (epochs < 1) throw ContractError("train config: epochs must be >= 1");
  if (weight_decay < 0) throw ContractError("train config: weight_decay must be >= 0");
  if (grad_clip && !(*grad_clip > 0)) throw ContractError("train config: grad_clip must be > 0");
}

std::vector<TrainingPair> make_training_pairs(const std::vector<Sentence>& corpus, const PromptVocab& vocab,
                                              const TemplateConfig& config) {
  std::vector<TrainingPair> out;
  out.reserve(corpus.size());
  for (const auto& s : corpus) {
    PromptedSentence gold = encode(s, vocab, config);
    out.push_back({mask(gold), std::move(gold)});
  }
  return out;
}

TrainResult train(ModelBundle& bundle, std::span<const TrainingPair> data, const PromptVocab& vocab,
                  const TrainConfig& tc, std::uint64_t seed, const TrainOptions& options) {
  tc.validate();
  if (data.empty()) throw ContractError("train: empty dataset");
  const ModelConfig& mc = bundle.config;
  if (mc.vocab_size != vocab.size()) {
    throw ContractError("train: model vocab_size " + std::to_string(mc.vocab_size) + " != vocabulary size " +
                        std::to_string(vocab.size()));
  }

  std::vector<TokenSequence> xs, ys;
  for (const auto& pair : data) {
    if (!pair.masked.masked || pair.gold.masked) throw ContractError("train: pair must be (masked, gold)");
    xs.push_back(tokenize(pair.masked, vocab));
    ys.push_back(tokenize(pair.gold, vocab));
    const int needed = mc.arch == Arch::encoder ? xs.back().size() : xs.back().size() + ys.back().size() - 1;
    if (needed > mc.max_positions) {
      throw ContractError("train: sequence of " + std::to_string(needed) + " positions exceeds max_positions " +
                          std::to_string(mc.max_positions));
    }
  }

  const int n = static_cast<int>(data.size());
  const int batches_per_epoch = (n + tc.batch_size - 1) / tc.batch_size;
  const long total_steps = static_cast<long>(batches_per_epoch) * tc.epochs;
  const int stop = options.stop_epoch < 0 ? tc.epochs : std::min(options.stop_epoch, tc.epochs);

  Parameters<float> grads = zero_parameters<float>(mc);
  auto& opt = bundle.optimizer;
  TrainResult result;

  for (int epoch = options.start_epoch; epoch < stop; ++epoch) {
    auto shuffle_rng = epoch_rng(seed, epoch, 0);
    auto dropout_rng = epoch_rng(seed, epoch, 1);
    Dropout dropout{mc.dropout, &dropout_rng};
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), shuffle_rng);

    double epoch_loss = 0.0;
    for (int b = 0; b < batches_per_epoch; ++b) {
      const int lo = b * tc.batch_size, hi = std::min(n, lo + tc.batch_size);
      set_zero(grads);
      double batch_loss = 0.0;
      for (int k = lo; k < hi; ++k) {
        const int i = order[k];
        float l = mc.arch == Arch::encoder
                      ? loss_mlm<float>(mc, bundle.params, xs[i], ys[i], tc.loss_scope, &grads, &dropout)
                      : loss_autoregressive<float>(mc, bundle.params, xs[i], ys[i], &grads, &dropout);
        batch_loss += l;
      }
      if (!std::isfinite(batch_loss)) {
        throw TrainingError("training diverged: non-finite loss at epoch " + std::to_string(epoch + 1) +
                                ", step " + std::to_string(opt.step + 1),
                            epoch + 1, opt.step + 1);
      }
      epoch_loss += batch_loss;

      const float inv = 1.0f / static_cast<float>(hi - lo);
      double norm_sq = 0.0;
      visit_tensors(grads, [&](const std::string&, Matrix<float>& g) {
        g *= inv;
        norm_sq += static_cast<double>(g.squaredNorm());
      });
      float clip_scale = 1.0f;
      if (tc.grad_clip) {
        const double norm = std::sqrt(norm_sq);
        if (norm > *tc.grad_clip) clip_scale = static_cast<float>(*tc.grad_clip / (norm + 1e-6));
      }

      double lr = tc.learning_rate;
      if (tc.schedule == Schedule::linear_decay) {
        lr *= std::max(0.0, static_cast<double>(total_steps - opt.step) / static_cast<double>(total_steps));
      }
      ++opt.step;
      const double bc1 = 1.0 - std::pow(kBeta1, static_cast<double>(opt.step));
      const double bc2 = 1.0 - std::pow(kBeta2, static_cast<double>(opt.step));
      const float step_size = static_cast<float>(lr / bc1);
      const float decay = static_cast<float>(1.0 - lr * tc.weight_decay);
      const float inv_sqrt_bc2 = static_cast<float>(1.0 / std::sqrt(bc2));

      // Walk params, grads and both moments in lockstep.
      std::vector<Matrix<float>*> gs, ms, vs;
      visit_tensors(grads, [&](const std::string&, Matrix<float>& t) { gs.push_back(&t); });
      visit_tensors(opt.first_moment, [&](const std::string&, Matrix<float>& t) { ms.push_back(&t); });
      visit_tensors(opt.second_moment, [&](const std::string&, Matrix<float>& t) { vs.push_back(&t); });
      std::size_t idx = 0;
      visit_tensors(bundle.params, [&](const std::string& name, Matrix<float>& p) {
        auto g = gs[idx]->array() * clip_scale;
        auto& m = *ms[idx];
        auto& v = *vs[idx];
        ++idx;
        m.array() = static_cast<float>(kBeta1) * m.array() + static_cast<float>(1 - kBeta1) * g;
        v.array() = static_cast<float>(kBeta2) * v.array() + static_cast<float>(1 - kBeta2) * g * g;
        if (decays(name) && tc.weight_decay > 0) p *= decay;
        p.array() -= step_size * m.array() / (v.array().sqrt() * inv_sqrt_bc2 + static_cast<float>(kAdamEps));
      });
      if (!all_finite(bundle.params)) {
        throw TrainingError("training diverged: non-finite parameter at epoch " + std::to_string(epoch + 1) +
                                ", step " + std::to_string(opt.step),
                            epoch + 1, opt.step);
      }
    }
    const double mean_loss = epoch_loss / n;
    result.losses.push_back(mean_loss);
    ++result.epochs_run;
    if (options.on_epoch && !options.on_epoch(epoch + 1, mean_loss, bundle)) break;
  }
  return result;
}

double slot_accuracy(const ModelBundle& bundle, std::span<const TrainingPair> data, const PromptVocab& vocab) {
  long correct = 0, total = 0;
  for (const auto& pair : data) {
    auto predicted = bundle.config.arch == Arch::encoder ? predict_encoder(bundle, pair.masked, vocab)
                                                         : predict_decoder_constrained(bundle, pair.masked, vocab);
    auto gold = to_lexemes(pair.gold);
    auto seq = tokenize(pair.masked, vocab);
    for (int p : seq.mask_positions) {
      ++total;
      correct += predicted[p] == gold[p] ? 1 : 0;
    }
  }
  return total == 0 ? 1.0 : static_cast<double>(correct) / static_cast<double>(total);
}

}  // namespace spt
