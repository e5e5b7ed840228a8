#include "spt/loss.hpp"

#include <numeric>

#include "spt/error.hpp"

namespace spt {

TokenSequence tokenize(const PromptedSentence& d, const PromptVocab& vocab) {
  TokenSequence seq;
  auto prompt = [&](const std::string& lexeme) {
    int id = vocab.prompt_id(lexeme);
    if (id < 0) throw EncodeError("tokenize: unknown prompt '" + lexeme + "'");
    seq.ids.push_back(id);
  };
  for (const auto& u : d.units) {
    if (u.abs) prompt(*u.abs);
    seq.mask_positions.push_back(seq.size());
    prompt(u.refx);
    seq.mask_positions.push_back(seq.size());
    prompt(u.label);
    if (u.pos) prompt(*u.pos);
    seq.ids.push_back(vocab.word_id(u.word));
  }
  return seq;
}

std::string_view to_string(LossScope s) {
  return s == LossScope::all_positions ? "all_positions" : "masked_only";
}

LossScope parse_loss_scope(std::string_view s) {
  if (s == "all_positions") return LossScope::all_positions;
  if (s == "masked_only") return LossScope::masked_only;
  throw ContractError("unknown loss scope '" + std::string(s) + "'");
}

template <typename S>
S cross_entropy(const Matrix<S>& logits, std::span<const int> rows, std::span<const int> targets,
                Matrix<S>* dlogits) {
  if (rows.size() != targets.size()) throw ContractError("cross_entropy: rows/targets size mismatch");
  if (dlogits) dlogits->setZero(logits.rows(), logits.cols());
  if (rows.empty()) return S(0);
  const S inv = S(1) / static_cast<S>(rows.size());
  S total = 0;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    auto row = logits.row(rows[r]);
    const S lse = log_sum_exp(row);
    total += lse - row(targets[r]);
    if (dlogits) {
      auto drow = dlogits->row(rows[r]);
      drow = ((row.array() - lse).exp() * inv).matrix();
      drow(targets[r]) -= inv;
    }
  }
  return total * inv;
}

template <typename S>
S loss_mlm(const ModelConfig& c, const Parameters<S>& p, const TokenSequence& x, const TokenSequence& y,
           LossScope scope, Parameters<S>* grads, const Dropout* dropout, GradFault fault) {
  if (x.size() != y.size()) {
    throw ContractError("loss_mlm: input has " + std::to_string(x.size()) + " tokens, label has " +
                        std::to_string(y.size()));
  }
  ForwardCache<S> cache;
  Matrix<S> logits = forward<S>(c, p, x.ids, grads ? &cache : nullptr, dropout);
  std::vector<int> rows;
  if (scope == LossScope::all_positions) {
    rows.resize(x.size());
    std::iota(rows.begin(), rows.end(), 0);
  } else {
    rows = x.mask_positions;
  }
  std::vector<int> targets;
  targets.reserve(rows.size());
  for (int r : rows) targets.push_back(y.ids[r]);
  Matrix<S> dlogits;
  S loss = cross_entropy<S>(logits, rows, targets, grads ? &dlogits : nullptr);
  if (grads) backward<S>(c, p, cache, dlogits, *grads, fault);
  return loss;
}

template <typename S>
S loss_autoregressive(const ModelConfig& c, const Parameters<S>& p, const TokenSequence& x,
                      const TokenSequence& y, Parameters<S>* grads, const Dropout* dropout, GradFault fault) {
  if (c.arch != Arch::decoder) throw ContractError("loss_autoregressive requires a decoder-mode model");
  if (y.ids.empty()) return S(0);
  if (x.size() == 0) throw ContractError("loss_autoregressive: empty prefix");
  std::vector<int> input(x.ids);
  input.insert(input.end(), y.ids.begin(), y.ids.end() - 1);
  ForwardCache<S> cache;
  Matrix<S> logits = forward<S>(c, p, input, grads ? &cache : nullptr, dropout);
  std::vector<int> rows(y.ids.size());
  std::iota(rows.begin(), rows.end(), x.size() - 1);
  Matrix<S> dlogits;
  S loss = cross_entropy<S>(logits, rows, y.ids, grads ? &dlogits : nullptr);
  if (grads) backward<S>(c, p, cache, dlogits, *grads, fault);
  return loss;
}

// The bundle-level losses run the network in float and reduce in double.
double loss_mlm(const ModelBundle& b, const TokenSequence& x, const TokenSequence& y, LossScope scope) {
  if (x.size() != y.size()) throw ContractError("loss_mlm: input/label length mismatch");
  Matrix<double> logits = forward<float>(b.config, b.params, x.ids).cast<double>();
  std::vector<int> rows;
  if (scope == LossScope::all_positions) {
    rows.resize(x.size());
    std::iota(rows.begin(), rows.end(), 0);
  } else {
    rows = x.mask_positions;
  }
  std::vector<int> targets;
  for (int r : rows) targets.push_back(y.ids[r]);
  return cross_entropy<double>(logits, rows, targets);
}

double loss_autoregressive(const ModelBundle& b, const TokenSequence& x, const TokenSequence& y) {
  if (b.config.arch != Arch::decoder) throw ContractError("loss_autoregressive requires a decoder-mode model");
  if (y.ids.empty()) return 0.0;
  if (x.size() == 0) throw ContractError("loss_autoregressive: empty prefix");
  std::vector<int> input(x.ids);
  input.insert(input.end(), y.ids.begin(), y.ids.end() - 1);
  Matrix<double> logits = forward<float>(b.config, b.params, input).cast<double>();
  std::vector<int> rows(y.ids.size());
  std::iota(rows.begin(), rows.end(), x.size() - 1);
  return cross_entropy<double>(logits, rows, y.ids);
}

#define SPT_INSTANTIATE(S)                                                                              \
  template S cross_entropy<S>(const Matrix<S>&, std::span<const int>, std::span<const int>, Matrix<S>*); \
  template S loss_mlm<S>(const ModelConfig&, const Parameters<S>&, const TokenSequence&,                \
                         const TokenSequence&, LossScope, Parameters<S>*, const Dropout*, GradFault);    \
  template S loss_autoregressive<S>(const ModelConfig&, const Parameters<S>&, const TokenSequence&,     \
                                    const TokenSequence&, Parameters<S>*, const Dropout*, GradFault);

SPT_INSTANTIATE(float)
SPT_INSTANTIATE(double)

#undef SPT_INSTANTIATE

}  // namespace spt
