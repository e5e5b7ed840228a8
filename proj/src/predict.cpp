#include "spt/predict.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>

#include "spt/error.hpp"
#include "spt/loss.hpp"

namespace spt {
namespace {

enum class Slot { head, dep, scaffold };

int argmax_among(const Eigen::Ref<const Eigen::Matrix<float, 1, Eigen::Dynamic>>& row,
                 const std::vector<int>& candidates) {
  int best = candidates.front();
  for (int id : candidates)
    if (row(id) > row(best)) best = id;
  return best;
}

int argmax_all(const Eigen::Ref<const Eigen::Matrix<float, 1, Eigen::Dynamic>>& row) {
  Eigen::Index best;
  row.maxCoeff(&best);
  return static_cast<int>(best);
}

struct SlotChooser {
  std::vector<int> index_candidates;
  const std::vector<int>* label_candidates;
  bool restricted;

  SlotChooser(const PromptVocab& vocab, int n, bool restricted)
      : label_candidates(&vocab.label_ids()), restricted(restricted) {
    if (label_candidates->empty()) throw ContractError("vocabulary has no label prompts");
    for (int j = 0; j <= n; ++j) index_candidates.push_back(vocab.index_id(j));
  }

  int choose(const Eigen::Ref<const Eigen::Matrix<float, 1, Eigen::Dynamic>>& row, Slot slot) const {
    if (!restricted) return argmax_all(row);
    return slot == Slot::head ? argmax_among(row, index_candidates) : argmax_among(row, *label_candidates);
  }
};

}  // namespace

std::vector<std::string> predict_encoder(const ModelBundle& bundle, const PromptedSentence& masked,
                                         const PromptVocab& vocab, const PredictOptions& options) {
  if (bundle.config.arch != Arch::encoder) throw ContractError("predict_encoder requires an encoder-mode model");
  if (!masked.masked) throw ContractError("predict_encoder: input is not masked");
  std::vector<std::string> out = to_lexemes(masked);
  if (out.empty()) return out;
  TokenSequence x = tokenize(masked, vocab);
  Matrix<float> logits = forward<float>(bundle.config, bundle.params, x.ids);
  SlotChooser chooser(vocab, masked.n(), options.restricted);
  for (int p : x.mask_positions) {
    const int id = x.ids[p];
    if (id == vocab.head_mask_id()) out[p] = vocab.token(chooser.choose(logits.row(p), Slot::head));
    else if (id == vocab.dep_mask_id()) out[p] = vocab.token(chooser.choose(logits.row(p), Slot::dep));
  }
  return out;
}

std::vector<std::string> predict_decoder_constrained(const ModelBundle& bundle, const PromptedSentence& masked,
                                                     const PromptVocab& vocab, const PredictOptions& options) {
  if (bundle.config.arch != Arch::decoder) {
    throw ContractError("predict_decoder_constrained requires a decoder-mode model");
  }
  if (!masked.masked) throw ContractError("predict_decoder_constrained: input is not masked");
  const std::vector<std::string> scaffold = to_lexemes(masked);
  TokenSequence prefix = tokenize(masked, vocab);
  const int N = prefix.size();
  if (N == 0) return {};

  std::vector<Slot> kinds(N, Slot::scaffold);
  for (std::size_t k = 0; k < prefix.mask_positions.size(); ++k) {
    kinds[prefix.mask_positions[k]] = k % 2 == 0 ? Slot::head : Slot::dep;
  }

  SlotChooser chooser(vocab, masked.n(), options.restricted);
  std::vector<int> seq = prefix.ids;
  seq.reserve(2 * N);
  std::vector<std::string> out;
  out.reserve(N);
  for (int t = 0; t < N; ++t) {
    if (kinds[t] == Slot::scaffold) {
      seq.push_back(prefix.ids[t]);
      out.push_back(scaffold[t]);
      continue;
    }
    Matrix<float> logits = forward<float>(bundle.config, bundle.params, seq);
    const int id = chooser.choose(logits.row(logits.rows() - 1), kinds[t]);
    seq.push_back(id);
    out.push_back(vocab.token(id));
  }
  if (static_cast<int>(out.size()) != N) throw ContractError("constrained generation overran the scaffold");
  return out;
}

ParseResult parse_sentence(const ModelBundle& bundle, const PromptVocab& vocab, const TemplateConfig& tmpl,
                           const Sentence& sentence, const DecodeOptions& decode_options,
                           const PredictOptions& options) {
  PromptedSentence masked = encode_masked(sentence, vocab, tmpl);
  auto filled = bundle.config.arch == Arch::encoder ? predict_encoder(bundle, masked, vocab, options)
                                                    : predict_decoder_constrained(bundle, masked, vocab, options);
  return decode(filled, masked.n(), vocab, tmpl, decode_options);
}

std::vector<ParseResult> parse_corpus(const ModelBundle& bundle, const PromptVocab& vocab,
                                      const TemplateConfig& tmpl, const std::vector<Sentence>& corpus,
                                      const DecodeOptions& decode_options, const PredictOptions& options,
                                      int threads) {
  std::vector<ParseResult> out(corpus.size());
  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(corpus.size())));
  if (workers == 1) {
    for (std::size_t i = 0; i < corpus.size(); ++i)
      out[i] = parse_sentence(bundle, vocab, tmpl, corpus[i], decode_options, options);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = next++; i < corpus.size(); i = next++)
          out[i] = parse_sentence(bundle, vocab, tmpl, corpus[i], decode_options, options);
      } catch (...) {
        errors[w] = std::current_exception();
        next = corpus.size();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace spt
