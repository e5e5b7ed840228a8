#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "spt/eval.hpp"
#include "spt/model.hpp"
#include "spt/prompt_vocab.hpp"
#include "spt/train.hpp"

namespace spt {

struct RunPaths {
  std::string train, dev, test, vocab, checkpoint, output_dir;
};

struct EvalFlags {
  bool exclude_punct = false;
  std::vector<std::string> punct_labels{"punct"};
  std::vector<int> length_edges = default_bucket_edges();
  std::vector<int> index_edges = default_bucket_edges();

  ScoreOptions score_options() const;
};

/// Everything a command needs, resolved from defaults, the config file,
/// command-line overrides and SPT_SEED (in that order of precedence, last wins).
struct RunConfig {
  RunPaths paths;
  TemplateConfig tmpl;
  ModelConfig model;
  TrainConfig train;
  EvalFlags eval;
  std::uint64_t seed = 1;
  int min_word_freq = 1;
  int threads = 1;
  /// Stop training once slot accuracy on the training set reaches this
  /// value, checked every `accuracy_check_every` epochs. Unset: never.
  std::optional<double> stop_at_accuracy;
  int accuracy_check_every = 10;

  nlohmann::json to_json() const;
  static RunConfig from_json(const nlohmann::json& j);
};

RunConfig load_run_config(const std::string& path);

/// Applies SPT_SEED when set. Returns true if the seed changed.
bool apply_seed_env(RunConfig& config);

/// Throws ContractError naming the first listed path that does not exist.
void require_existing(const std::vector<std::pair<std::string, std::string>>& labelled_paths);

}  // namespace spt
