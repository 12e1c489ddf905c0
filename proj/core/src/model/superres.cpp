#include "lnop/model/superres.hpp"

#include <algorithm>

#include "lnop/error.hpp"

namespace lnop {

std::string to_string(SuperresPipeline p) {
  return p == SuperresPipeline::pool_interpolate ? "pool-interpolate" : "native-modes";
}

SuperresPipeline superres_pipeline_for(Architecture arch) {
  return arch == Architecture::learnable ? SuperresPipeline::pool_interpolate : SuperresPipeline::native_modes;
}

Shape resolution_factors(const ModelConfig& config, const Shape& grid) {
  if (grid.size() != config.dims.size()) {
    throw ResolutionError("grid " + to_string(grid) + " has a different rank than training grid " +
                          to_string(config.dims));
  }
  Shape factors(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < config.dims[i] || grid[i] % config.dims[i] != 0) {
      throw ResolutionError("axis " + std::to_string(i) + ": extent " + std::to_string(grid[i]) +
                            " is not an integer multiple of training extent " + std::to_string(config.dims[i]));
    }
    factors[i] = grid[i] / config.dims[i];
  }
  return factors;
}

Tensor forward_superres(const OperatorModel& model, const Tensor& input) {
  const auto& cfg = model.config();
  if (input.rank() != cfg.dims.size() + 1) {
    throw DimensionError("superres input " + to_string(input.shape()) + " does not have " +
                         std::to_string(cfg.dims.size()) + " spatial axes");
  }
  const Shape grid(input.shape().begin() + 1, input.shape().end());
  const Shape factors = resolution_factors(cfg, grid);
  if (std::all_of(factors.begin(), factors.end(), [](auto f) { return f == 1; })) return model.forward(input);
  if (superres_pipeline_for(cfg.arch) == SuperresPipeline::native_modes) return model.forward_native(input);
  const Tensor pooled = avg_pool(input, factors);
  const Tensor hidden = model.forward_hidden(pooled);
  return model.project(interpolate(hidden, grid, default_interp_mode(grid.size())));
}

}  // namespace lnop
