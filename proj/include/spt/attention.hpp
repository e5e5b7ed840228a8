#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "spt/codec.hpp"
#include "spt/model.hpp"

namespace spt {

struct AttentionExport {
  std::vector<std::string> tokens;
  /// attention[layer][head]: T x T, rows sum to 1.
  std::vector<std::vector<Matrix<float>>> attention;
  /// cosine[layer]: T x T cosine similarity of that layer's output states.
  std::vector<Matrix<float>> cosine;

  nlohmann::json to_json() const;
};

/// Attention maps and hidden-state similarities for one masked template.
/// Requires an encoder-mode model.
AttentionExport export_attention(const ModelBundle& bundle, const PromptedSentence& masked,
                                 const PromptVocab& vocab);

}  // namespace spt
