#pragma once

#include <string>
#include <vector>

#include "spt/codec.hpp"
#include "spt/model.hpp"
#include "spt/prompt_vocab.hpp"

namespace spt {

struct PredictOptions {
  /// Limit [HEAD] slots to [0]..[n] and [DEP] slots to label prompts.
  /// When false the argmax runs over the whole vocabulary.
  bool restricted = true;
};

/// One bidirectional pass over D_M; every [HEAD]/[DEP] position is replaced
/// by its argmax prompt, every other position copied from the input.
std::vector<std::string> predict_encoder(const ModelBundle& bundle, const PromptedSentence& masked,
                                         const PromptVocab& vocab, const PredictOptions& options = {});

/// Generates D after the prefix D_M. Scaffold positions (abs, POS, word)
/// are forced from the input; only ref/label slots are chosen by the model.
std::vector<std::string> predict_decoder_constrained(const ModelBundle& bundle, const PromptedSentence& masked,
                                                     const PromptVocab& vocab,
                                                     const PredictOptions& options = {});

/// Full text-level pipeline for one sentence: masked template, prediction,
/// decode. Heads and labels of `sentence` are not read.
ParseResult parse_sentence(const ModelBundle& bundle, const PromptVocab& vocab, const TemplateConfig& tmpl,
                           const Sentence& sentence, const DecodeOptions& decode_options = {},
                           const PredictOptions& options = {});

/// parse_sentence over a corpus. Sentences are independent, so up to
/// `threads` workers share the read-only bundle; results keep input order.
std::vector<ParseResult> parse_corpus(const ModelBundle& bundle, const PromptVocab& vocab,
                                      const TemplateConfig& tmpl, const std::vector<Sentence>& corpus,
                                      const DecodeOptions& decode_options = {},
                                      const PredictOptions& options = {}, int threads = 1);

}  // namespace spt
