#pragma once

#include <cstdint>
#include <functional>
#include <span>

#include "lnop/tensor/tensor.hpp"

namespace lnop {

/// Power-law spectrum sigma * (|f|^2 + tau^2)^(-alpha/2) over integer
/// frequency vectors f of the periodic grid.
struct GrfSpec {
  double alpha = 2.0;
  double tau = 3.0;
  double sigma = 1.0;

  void validate() const;
  double amplitude(double freq_sq) const;
};

/// Amplitude of the coefficient at a signed integer frequency vector.
using SpectralAmplitude = std::function<double(std::span<const long>)>;

/// Periodic real field on `extents` (each >= 4): complex Gaussian
/// coefficients with standard normal real and imaginary parts scaled by the
/// amplitude, symmetrised as (c_f + conj c_{-f}) / 2, DC set to zero, then
/// inverse transformed without normalisation. The pointwise variance is
/// sum_{f != 0} amplitude(f)^2.
Tensor grf_sample(const Shape& extents, const SpectralAmplitude& amplitude, std::uint64_t seed);
Tensor grf_sample(const Shape& extents, const GrfSpec& spec, std::uint64_t seed);

}  // namespace lnop
