#pragma once

#include <span>

#include "lnop/tensor/tensor.hpp"

namespace lnop {

/// 100 * ||pred - target||_2 / ||target||_2. Throws MetricError when the
/// target has zero norm and DimensionError on a shape mismatch.
double relative_l2_percent(const Tensor& pred, const Tensor& target);

/// Mean of relative_l2_percent over paired samples.
double mean_relative_l2_percent(std::span<const Tensor> preds, std::span<const Tensor> targets);

}  // namespace lnop
