#pragma once

#include <string>

#include "lnop/model/operator_model.hpp"
#include "lnop/model/resample.hpp"

namespace lnop {

/// How a model is evaluated away from its training grid.
enum class SuperresPipeline {
  /// average-pool to the training grid, run P and the blocks, interpolate the
  /// d_v-channel hidden state back up, then apply Q.
  pool_interpolate,
  /// evaluate directly at the new grid; mode truncation keeps the spectral
  /// weights meaningful (fourier architecture).
  native_modes,
};

std::string to_string(SuperresPipeline p);
SuperresPipeline superres_pipeline_for(Architecture arch);

/// Integer per-axis ratio between `grid` and the model's training grid.
/// Throws ResolutionError naming both extents otherwise.
Shape resolution_factors(const ModelConfig& config, const Shape& grid);

/// Evaluates the model on an input whose grid is an integer multiple of the
/// training grid. At ratio 1 this is bit-identical to forward().
Tensor forward_superres(const OperatorModel& model, const Tensor& input);

}  // namespace lnop
