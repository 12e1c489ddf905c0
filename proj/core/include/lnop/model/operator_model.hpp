#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include <nlohmann/json.hpp>

#include "lnop/blocks/param_count.hpp"
#include "lnop/blocks/spectral.hpp"
#include "lnop/blocks/transform_block.hpp"
#include "lnop/tensor/autodiff.hpp"

namespace lnop {

/// Architecture metadata of an operator model.
struct ModelConfig {
  Architecture arch = Architecture::learnable;
  std::size_t in_channels = 1;   ///< d_a
  std::size_t width = 16;        ///< d_v
  std::size_t out_channels = 1;  ///< d_u
  Shape dims;                    ///< training grid extents d_i
  Shape modes;                   ///< transform dimensions k_i
  std::size_t blocks = 4;        ///< T
  bool positional_encoding = true;
  MixInit mix_init = MixInit::random;
  std::uint64_t seed = 0;

  std::size_t spatial_rank() const noexcept { return dims.size(); }
  /// d_a plus one normalised-coordinate channel per axis when enabled.
  std::size_t lift_inputs() const noexcept;
  std::size_t projection_hidden() const noexcept { return 4 * width; }
  BlockShape block_shape() const { return {width, dims, modes}; }
  void validate() const;

  nlohmann::json to_json() const;
  static ModelConfig from_json(const nlohmann::json& j);
};

/// G = Q o block_T o ... o block_1 o P.
///
/// P is a pointwise affine lift to d_v channels, each block is
/// relu(W.v + b + K v) with K either the learnable M -> R -> N path or the
/// truncated DFT path, and Q is a pointwise two-layer network
/// d_v -> 4 d_v -> d_u with a ReLU in between and no output activation.
/// Fields are channel-first: (channels, d_1, ..., d_n).
class OperatorModel {
 public:
  explicit OperatorModel(ModelConfig config);

  const ModelConfig& config() const noexcept { return config_; }

  std::vector<Parameter*> parameters();
  std::vector<const Parameter*> parameters() const;
  std::size_t parameter_count() const;
  BlockParamCount block_params() const;

  /// Differentiable forward at the training resolution.
  Var forward(Tape& tape, const Tensor& input);
  /// Inference at the training resolution (records nothing).
  Tensor forward(const Tensor& input) const;

  /// Output of the last block (d_v channels) before the projection.
  Tensor forward_hidden(const Tensor& input) const;
  /// Applies Q pointwise at whatever resolution `hidden` has.
  Tensor project(const Tensor& hidden) const;

  /// Fourier architecture only: forward at an arbitrary grid, relying on mode
  /// truncation for resolution transfer.
  Tensor forward_native(const Tensor& input) const;

  /// Input with the positional-encoding channels appended.
  Tensor with_positional_encoding(const Tensor& input) const;

 private:
  struct Bound;
  Bound bind(const ParamBinder& binder);
  Bound bind() const;
  Var run_hidden(const Bound& b, const Tensor& input, const Shape& grid) const;
  Var run_projection(const Bound& b, const Var& hidden) const;
  void check_input(const Tensor& input, bool any_grid) const;

  ModelConfig config_;
  Parameter lift_weight_;
  Parameter lift_bias_;
  std::vector<TransformBlockParams> learnable_blocks_;
  std::vector<SpectralBaselineParams> fourier_blocks_;
  Parameter proj_hidden_weight_;
  Parameter proj_hidden_bias_;
  Parameter proj_out_weight_;
  Parameter proj_out_bias_;
};

/// Normalised coordinates idx / (d_i - 1) in [0, 1], one channel per axis.
Tensor positional_channels(const Shape& grid);

void save_checkpoint(const OperatorModel& model, const std::filesystem::path& path);
OperatorModel load_checkpoint(const std::filesystem::path& path);

}  // namespace lnop
