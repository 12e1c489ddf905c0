#pragma once

#include <random>
#include <string>
#include <vector>

#include "lnop/blocks/transform_block.hpp"
#include "lnop/tensor/autodiff.hpp"

namespace lnop {

/// Complex values as a (real, imaginary) pair of equally shaped real tensors.
struct ComplexTensor {
  Tensor re;
  Tensor im;
};

struct ComplexVar {
  Var re;
  Var im;
};

/// Largest mode count that still truncates axis of extent d: ceil(d/2).
constexpr std::size_t max_truncated_modes(std::size_t d) { return (d + 1) / 2; }

/// Mode count meaning "keep everything": the full complex spectrum d on a
/// leading axis, the non-redundant half floor(d/2)+1 on the last axis.
constexpr std::size_t untruncated_modes(std::size_t d, bool last_axis) { return last_axis ? d / 2 + 1 : d; }

/// Per-axis factor matrices of the truncated DFT and its zero-padded inverse.
///
/// Convention: X[f] = sum_x v[x] exp(-2 pi i f x / d), unnormalised forward,
/// 1/d on the inverse. Axis i retains the nonnegative frequencies
/// 0..k_i-1. The inverse treats the last axis as Hermitian (frequency f > 0
/// below Nyquist counted twice, real part taken), which reconstructs the
/// negative frequencies of that axis by conjugate symmetry.
///
/// Each k_i must be <= ceil(d_i/2), or equal untruncated_modes(d_i, last).
class SpectralBasis {
 public:
  SpectralBasis(Shape dims, Shape modes);

  const Shape& dims() const noexcept { return dims_; }
  const Shape& modes() const noexcept { return modes_; }
  std::size_t rank() const noexcept { return dims_.size(); }

  /// (d_i, k_i) real and imaginary parts of exp(-2 pi i f x / d_i).
  /// Shared so that tapes recorded against the basis may outlive it.
  const Var& forward_re(std::size_t axis) const { return axes_.at(axis).fwd_re; }
  const Var& forward_im(std::size_t axis) const { return axes_.at(axis).fwd_im; }
  /// (k_i, d_i) inverse factors including 1/d_i and, on the last axis, the
  /// Hermitian weights.
  const Var& inverse_re(std::size_t axis) const { return axes_.at(axis).inv_re; }
  const Var& inverse_im(std::size_t axis) const { return axes_.at(axis).inv_im; }

 private:
  struct Axis {
    Var fwd_re, fwd_im, inv_re, inv_im;
  };
  Shape dims_;
  Shape modes_;
  std::vector<Axis> axes_;
};

/// Throws ModeError unless every k_i is admissible for d_i.
void validate_spectral_modes(const Shape& dims, const Shape& modes);

/// Truncated DFT over axes [first_axis, first_axis + basis.rank()) of a real v.
ComplexVar dft_truncated(const Var& v, const SpectralBasis& basis, std::size_t first_axis);
/// Zero-padded inverse DFT back to basis.dims(); output is real.
Var idft_padded(const ComplexVar& z, const SpectralBasis& basis, std::size_t first_axis);

/// Convenience forms over all axes of a tensor.
ComplexTensor dft_truncated(const Tensor& v, const Shape& modes);
Tensor idft_padded(const ComplexTensor& z, const Shape& dims);

/// Complex per-mode channel mixing with the 4-product rule.
ComplexVar complex_mode_mix(const ComplexVar& z, const Var& mix_re, const Var& mix_im);

/// Learnables of the truncated-DFT baseline block: complex R stored as two
/// real tensors plus the same pointwise channel map as the learnable block.
struct SpectralBaselineParams {
  BlockShape shape;
  Parameter mix_re;
  Parameter mix_im;
  Parameter channel;
  Parameter channel_bias;

  /// R parts ~ U[0,1)/d_v^2; W and bias ~ U(+-sqrt(1/d_v)).
  static SpectralBaselineParams init(const BlockShape& shape, std::mt19937_64& rng, MixInit mix_init,
                                     const std::string& prefix);
  std::vector<Parameter*> parameters();
};

struct BoundSpectralBlock {
  Var mix_re;
  Var mix_im;
  Var channel;
  Var channel_bias;
};

BoundSpectralBlock bind(SpectralBaselineParams& params, const ParamBinder& binder);
BoundSpectralBlock bind(const SpectralBaselineParams& params);

/// sigma(W.v + b + iDFT(R.DFT(v))). The basis dims may differ from the
/// training dims: mode truncation makes the block resolution-agnostic.
Var spectral_block_update(const Var& v, const BoundSpectralBlock& block, const SpectralBasis& basis, Activation act);

}  // namespace lnop
