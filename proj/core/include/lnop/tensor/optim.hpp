#pragma once

#include <span>

#include "lnop/tensor/autodiff.hpp"

namespace lnop {

struct AdamOptions {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  /// L2 penalty folded into the gradient; off by default.
  double weight_decay = 0.0;
};

/// One bias-corrected Adam update of every parameter from its accumulated
/// gradient. Throws NumericalError naming the first parameter whose gradient
/// holds NaN/Inf; no parameter is modified in that case.
void adam_step(std::span<Parameter* const> params, const AdamOptions& options);

/// Step decay: lr0 * factor^floor(epoch / period).
double step_lr(int epoch, double lr0, int period, double factor);

void zero_grad(std::span<Parameter* const> params);

}  // namespace lnop
