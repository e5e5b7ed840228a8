#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "spt/codec.hpp"
#include "spt/loss.hpp"
#include "spt/model.hpp"

namespace spt {

enum class Schedule { linear_decay, constant };

std::string_view to_string(Schedule s);
Schedule parse_schedule(std::string_view s);

struct TrainConfig {
  int batch_size = 16;
  double learning_rate = 3e-4;
  int epochs = 30;
  Schedule schedule = Schedule::linear_decay;
  double weight_decay = 0.01;
  std::optional<double> grad_clip = 1.0;
  LossScope loss_scope = LossScope::all_positions;

  /// Fine-tuning settings used with large pre-trained encoders:
  /// batch 8, lr 1e-5, 10 epochs, linear decay.
  static TrainConfig fine_tune_preset();
  void validate() const;
};

struct TrainingPair {
  PromptedSentence masked;  // D_M
  PromptedSentence gold;    // D
};

std::vector<TrainingPair> make_training_pairs(const std::vector<Sentence>& corpus,
                                              const PromptVocab& vocab, const TemplateConfig& config);

/// Return false to stop after the current epoch.
using EpochCallback = std::function<bool(int epoch, double loss, const ModelBundle& bundle)>;

struct TrainOptions {
  /// Epoch range to run, [start_epoch, stop_epoch). stop_epoch < 0 means
  /// TrainConfig::epochs. The schedule always spans all TrainConfig::epochs,
  /// so a run split across a checkpoint matches an uninterrupted one.
  int start_epoch = 0;
  int stop_epoch = -1;
  EpochCallback on_epoch;
};

struct TrainResult {
  std::vector<double> losses;  // mean training loss per epoch run
  int epochs_run = 0;
};

/// AdamW with the configured schedule. Shuffling and dropout are seeded
/// per epoch from `seed`, so runs are reproducible bit for bit.
/// Throws TrainingError on a non-finite loss or parameter.
TrainResult train(ModelBundle& bundle, std::span<const TrainingPair> data, const PromptVocab& vocab,
                  const TrainConfig& config, std::uint64_t seed, const TrainOptions& options = {});

/// Fraction of masked slots (ref and label) predicted correctly.
double slot_accuracy(const ModelBundle& bundle, std::span<const TrainingPair> data, const PromptVocab& vocab);

}  // namespace spt
