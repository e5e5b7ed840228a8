#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spt/loss.hpp"
#include "spt/model.hpp"

namespace spt {

struct GradCheckConfig {
  /// Dimensions of the checked network; arch is overridden per loss
  /// (encoder for the masked-LM loss, decoder for the autoregressive one).
  ModelConfig model{.arch = Arch::encoder,
                    .layers = 2,
                    .heads = 2,
                    .model_dim = 8,
                    .ff_dim = 16,
                    .max_positions = 24,
                    .vocab_size = 20,
                    .dropout = 0.0,
                    .seed = 7};
  int sequence_length = 8;
  double step = 1e-4;
  double tolerance = 1e-3;
  /// Relative errors are taken against max(|analytic|, |numeric|, floor).
  double floor = 1e-6;
  LossScope scope = LossScope::all_positions;
  GradFault fault = GradFault::none;
};

struct TensorGradError {
  std::string loss;  // "mlm" or "autoregressive"
  std::string tensor;
  double max_relative_error = 0.0;
  double max_absolute_error = 0.0;
  bool passed = true;
};

struct GradCheckReport {
  std::vector<TensorGradError> tensors;
  /// Loss change under a zero perturbation; must be exactly 0.
  double zero_perturbation_delta = 0.0;
  bool passed = true;

  double worst_relative_error() const;
};

/// Central finite differences in double precision against the analytic
/// gradients of both losses, element by element on every tensor.
GradCheckReport grad_check(const GradCheckConfig& config);

}  // namespace spt
