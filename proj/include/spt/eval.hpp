#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "spt/codec.hpp"
#include "spt/model.hpp"
#include "spt/train.hpp"
#include "spt/treebank.hpp"

namespace spt {

/// Upper bounds of consecutive buckets: {10, 20, 30} means 1-10, 11-20, 21-30.
std::vector<int> default_bucket_edges();

struct BucketRow {
  int lo = 0;
  int hi = 0;      // -1 for the overflow bucket (lo and above)
  long count = 0;  // sentences (length buckets) or indices (index buckets)
  long scored_tokens = 0;
  double uas = 0.0;
  double las = 0.0;

  std::string range() const;
};

struct EvalReport {
  double uas = 0.0;
  double las = 0.0;
  long token_count = 0;
  long sentence_count = 0;
  long invalid_slots = 0;
  std::vector<BucketRow> per_length_bucket;
  std::vector<BucketRow> per_index_bucket;

  nlohmann::json to_json() const;
  std::string to_text() const;
};

struct ScoreOptions {
  bool exclude_punct = false;
  std::set<std::string> punct_labels{"punct"};
  /// Count invalid slots as wrong. Unset means: follow each ParseResult's policy.
  std::optional<bool> strict;
  std::vector<int> length_edges = default_bucket_edges();
  std::vector<int> index_edges = default_bucket_edges();
};

/// Treats every token of a predicted corpus as a valid slot.
std::vector<ParseResult> as_parse_results(const std::vector<Sentence>& predicted);

/// Corpus-level UAS/LAS plus both bucket breakdowns. Throws EvalError when
/// sentence or token counts disagree.
EvalReport score(const std::vector<Sentence>& gold, const std::vector<ParseResult>& pred,
                 const ScoreOptions& options = {});

std::vector<BucketRow> bucket_by_length(const std::vector<Sentence>& gold, const std::vector<ParseResult>& pred,
                                        const std::vector<int>& edges, const ScoreOptions& options = {});
std::vector<BucketRow> bucket_by_index(const std::vector<Sentence>& gold, const std::vector<ParseResult>& pred,
                                       const std::vector<int>& edges, const ScoreOptions& options = {});

/// Rows formatted like the sentence-length and index-range tables, with a
/// closing "all" row.
std::string format_length_table(const std::vector<BucketRow>& rows, const EvalReport& total);
std::string format_index_table(const std::vector<BucketRow>& rows, const EvalReport& total);

struct SpeedReport {
  double sentences_per_second = 0.0;
  long total_sentences = 0;
  double wall_seconds = 0.0;
  int batch_size = 1;
  int threads = 1;

  nlohmann::json to_json() const;
  std::string to_text() const;
};

struct BenchOptions {
  int batch_size = 1;
  int threads = 1;
  /// Keep cycling through the data until at least this much time has passed.
  double min_seconds = 0.0;
};

/// Times the full text pipeline (encode, mask, tokenize, predict, decode)
/// after one untimed warm-up batch.
SpeedReport benchmark_speed(const ModelBundle& bundle, const PromptVocab& vocab, const TemplateConfig& tmpl,
                            const std::vector<Sentence>& data, const BenchOptions& options = {});

enum class AblationVariant { without_abs, without_pos };

std::string_view to_string(AblationVariant v);

struct AblationRow {
  std::string name;
  TemplateConfig tmpl;
  double uas = 0.0;
  double las = 0.0;
  double delta_uas = 0.0;
  double delta_las = 0.0;
  /// Index prompts found in the model inputs; zero whenever use_abs is off.
  long abs_prompts_in_input = 0;
  std::vector<double> losses;
  std::string error;  // non-empty when this variant failed
};

struct AblationTable {
  std::vector<AblationRow> rows;  // base first

  nlohmann::json to_json() const;
  std::string to_text() const;
};

struct AblationSetup {
  TemplateConfig base;
  ModelConfig model;
  TrainConfig train;
  std::uint64_t seed = 1;
  std::string fallback_label;
};

/// Trains the base template and each variant with identical seeds and
/// shuffling, then scores all of them on `test`.
AblationTable run_ablation(const std::vector<Sentence>& train_set, const std::vector<Sentence>& test_set,
                           const PromptVocab& vocab, const AblationSetup& setup,
                           const std::vector<AblationVariant>& variants);

}  // namespace spt
