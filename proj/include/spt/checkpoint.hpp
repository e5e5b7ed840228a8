#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "spt/model.hpp"
#include "spt/prompt_vocab.hpp"

namespace spt {

/// Everything besides tensors that prediction needs to reproduce a run.
struct CheckpointMeta {
  TemplateConfig tmpl;
  std::string fallback_label;
  int epochs_completed = 0;
  nlohmann::json extra = nlohmann::json::object();
};

struct LoadedCheckpoint {
  ModelBundle bundle;
  CheckpointMeta meta;
  std::uint64_t vocab_hash = 0;
};

/// Binary container, all integers little-endian:
///   "SPTCKPT\0" | u32 version | u64 vocab hash | u32 len + JSON header |
///   u32 count | count x (u32 len + name | u32 rows | u32 cols | f32 data)
/// Tensors are the parameters followed by "opt.m.*" and "opt.v.*".
void save_checkpoint(const std::string& path, const ModelBundle& bundle, const PromptVocab& vocab,
                     const CheckpointMeta& meta);

/// When `vocab` is given its hash must match the stored one, otherwise
/// CheckpointError is thrown.
LoadedCheckpoint load_checkpoint(const std::string& path, const PromptVocab* vocab = nullptr);

}  // namespace spt
