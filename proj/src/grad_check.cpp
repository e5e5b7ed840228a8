#include "spt/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "spt/error.hpp"

namespace spt {

double GradCheckReport::worst_relative_error() const {
  double worst = 0.0;
  for (const auto& t : tensors) worst = std::max(worst, t.max_relative_error);
  return worst;
}

GradCheckReport grad_check(const GradCheckConfig& gc) {
  ModelConfig base = gc.model;
  base.dropout = 0.0;
  base.validate();
  if (base.model_dim > 16 || base.layers > 2 || base.vocab_size > 40) {
    throw ContractError("grad_check is meant for desk dimensions (dim <= 16, layers <= 2, vocab <= 40)");
  }

  std::mt19937_64 rng(base.seed);
  std::uniform_int_distribution<int> token(0, base.vocab_size - 1);
  std::normal_distribution<double> jitter(0.0, 0.3);

  const int N = gc.sequence_length;
  TokenSequence x, y;
  for (int i = 0; i < N; ++i) {
    y.ids.push_back(token(rng));
    x.ids.push_back(y.ids.back());
  }
  // Every third position plays the role of a masked slot.
  for (int i = 1; i < N; i += 3) {
    x.mask_positions.push_back(i);
    x.ids[i] = token(rng);
  }
  y.mask_positions = x.mask_positions;

  GradCheckReport report;
  for (Arch arch : {Arch::encoder, Arch::decoder}) {
    ModelConfig c = base;
    c.arch = arch;
    const int needed = arch == Arch::encoder ? N : 2 * N - 1;
    c.max_positions = std::max(c.max_positions, needed);
    const std::string loss_name = arch == Arch::encoder ? "mlm" : "autoregressive";

    // Jitter every tensor so gains, biases and attention are all non-trivial.
    Parameters<double> p = init_parameters<double>(c, c.seed);
    visit_tensors(p, [&](const std::string&, Matrix<double>& t) {
      for (Eigen::Index i = 0; i < t.size(); ++i) t.data()[i] += jitter(rng);
    });

    auto loss = [&](const Parameters<double>& params, Parameters<double>* grads, GradFault fault) {
      return arch == Arch::encoder ? loss_mlm<double>(c, params, x, y, gc.scope, grads, nullptr, fault)
                                   : loss_autoregressive<double>(c, params, x, y, grads, nullptr, fault);
    };

    Parameters<double> analytic = zero_parameters<double>(c);
    const double base_loss = loss(p, &analytic, gc.fault);
    report.zero_perturbation_delta = std::max(report.zero_perturbation_delta,
                                              std::abs(loss(p, nullptr, GradFault::none) - base_loss));

    std::vector<Matrix<double>*> grads;
    visit_tensors(analytic, [&](const std::string&, Matrix<double>& g) { grads.push_back(&g); });
    std::size_t idx = 0;
    visit_tensors(p, [&](const std::string& name, Matrix<double>& t) {
      const Matrix<double>& g = *grads[idx++];
      TensorGradError e{loss_name, name};
      for (Eigen::Index i = 0; i < t.size(); ++i) {
        const double orig = t.data()[i];
        t.data()[i] = orig + gc.step;
        const double up = loss(p, nullptr, GradFault::none);
        t.data()[i] = orig - gc.step;
        const double down = loss(p, nullptr, GradFault::none);
        t.data()[i] = orig;
        const double numeric = (up - down) / (2 * gc.step);
        const double a = g.data()[i];
        const double abs_err = std::abs(a - numeric);
        const double rel = abs_err / std::max({std::abs(a), std::abs(numeric), gc.floor});
        e.max_absolute_error = std::max(e.max_absolute_error, abs_err);
        e.max_relative_error = std::max(e.max_relative_error, rel);
      }
      e.passed = e.max_relative_error < gc.tolerance;
      report.passed = report.passed && e.passed;
      report.tensors.push_back(std::move(e));
    });
  }
  report.passed = report.passed && report.zero_perturbation_delta == 0.0;
  return report;
}

}  // namespace spt
