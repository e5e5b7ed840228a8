#pragma once

#include <span>
#include <vector>

#include "spt/codec.hpp"
#include "spt/model.hpp"
#include "spt/prompt_vocab.hpp"

namespace spt {

/// Model-side view of a prompted sentence: one id per lexeme.
struct TokenSequence {
  std::vector<int> ids;
  /// Positions of the ref/label slots, i.e. where D_M and D differ.
  std::vector<int> mask_positions;

  int size() const { return static_cast<int>(ids.size()); }
};

/// Prompts map to their own id, words to the word vocabulary or <unk>.
/// Throws EncodeError on a prompt lexeme the vocabulary does not know.
TokenSequence tokenize(const PromptedSentence& d, const PromptVocab& vocab);

enum class LossScope { all_positions, masked_only };

std::string_view to_string(LossScope s);
LossScope parse_loss_scope(std::string_view s);

/// Mean cross-entropy of `targets[r]` under row `rows[r]` of `logits`.
/// When `dlogits` is given it is resized and receives d(loss)/d(logits).
template <typename Scalar>
Scalar cross_entropy(const Matrix<Scalar>& logits, std::span<const int> rows,
                     std::span<const int> targets, Matrix<Scalar>* dlogits = nullptr);

/// Masked-LM loss of y given x: mean NLL over every position
/// (all_positions) or over the slot positions only (masked_only).
/// Accumulates gradients into `grads` when non-null.
template <typename Scalar>
Scalar loss_mlm(const ModelConfig& config, const Parameters<Scalar>& params, const TokenSequence& x,
                const TokenSequence& y, LossScope scope, Parameters<Scalar>* grads = nullptr,
                const Dropout* dropout = nullptr, GradFault fault = GradFault::none);

/// Autoregressive loss: mean NLL of each y_i given x followed by y_<i,
/// computed in one causal pass over x ++ y[0..N-2].
template <typename Scalar>
Scalar loss_autoregressive(const ModelConfig& config, const Parameters<Scalar>& params,
                           const TokenSequence& x, const TokenSequence& y,
                           Parameters<Scalar>* grads = nullptr, const Dropout* dropout = nullptr,
                           GradFault fault = GradFault::none);

double loss_mlm(const ModelBundle& bundle, const TokenSequence& x, const TokenSequence& y,
                LossScope scope);
double loss_autoregressive(const ModelBundle& bundle, const TokenSequence& x, const TokenSequence& y);

}  // namespace spt
