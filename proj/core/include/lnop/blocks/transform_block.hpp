#pragma once

#include <random>
#include <span>
#include <string>
#include <vector>

#include "lnop/tensor/autodiff.hpp"

namespace lnop {

enum class Activation { relu, identity };

/// How the mode-mixing tensor is initialised.
enum class MixInit { random, identity_noise };

MixInit parse_mix_init(const std::string& name);
std::string to_string(MixInit init);

/// Geometry shared by every block of a model: channel width d_v, spatial
/// extents d_i and retained transform dimensions k_i.
struct BlockShape {
  std::size_t channels = 0;
  Shape dims;
  Shape modes;

  std::size_t spatial_rank() const noexcept { return dims.size(); }
  /// Shape (d_v, d_v, k_1..k_n) of a mode-mixing tensor.
  Shape mix_shape() const;
  /// Checks k_i <= d_i for a learnable transform.
  void validate_learnable() const;
};

/// Learnables of one transform block.
///
/// Every tensor here is real. The per-axis matrices are shared by all channels.
struct TransformBlockParams {
  BlockShape shape;
  std::vector<Parameter> forward;  ///< L_f[i], shape (d_i, k_i)
  std::vector<Parameter> inverse;  ///< L_b[i], shape (k_i, d_i)
  Parameter mix;                   ///< R, shape (d_v, d_v, k_1..k_n)
  Parameter channel;               ///< W, shape (d_v, d_v): out[j] = sum_i v[i] W[i, j]
  Parameter channel_bias;          ///< shape (d_v)

  /// L_f ~ U(+-sqrt(1/d_i)), L_b ~ U(+-sqrt(1/k_i)), R ~ U[0,1)/d_v^2,
  /// W and its bias ~ U(+-sqrt(1/d_v)).
  static TransformBlockParams init(const BlockShape& shape, std::mt19937_64& rng, MixInit mix_init,
                                   const std::string& prefix);

  std::vector<Parameter*> parameters();
};

/// A block's parameters as Vars for one forward evaluation.
struct BoundTransformBlock {
  std::vector<Var> forward;
  std::vector<Var> inverse;
  Var mix;
  Var channel;
  Var channel_bias;
};

BoundTransformBlock bind(TransformBlockParams& params, const ParamBinder& binder);
BoundTransformBlock bind(const TransformBlockParams& params);

/// M: contracts spatial axis i+1 of v (shape (d_v, d_1..d_n)) with forward[i],
/// for i = 0..n-1 in order. The channel axis is untouched.
Var forward_transform(const Var& v, std::span<const Var> forward);

/// R: out[j, m] = sum_i mix[i, j, m] * z[i, m] for every mode multi-index m.
Var mode_mix(const Var& z, const Var& mix);

/// N: contracts mode axis i+1 of z with inverse[i], restoring extents d_i.
/// Not constrained to invert forward_transform.
Var inverse_transform(const Var& z, std::span<const Var> inverse);

/// W.v + b applied pointwise over the grid.
Var channel_map(const Var& v, const Var& weight, const Var& bias);

Var activate(const Var& x, Activation act);

/// sigma(W.v + b + N(R.M(v))).
Var block_update(const Var& v, const BoundTransformBlock& block, Activation act);

}  // namespace lnop
