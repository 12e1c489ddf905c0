#include "lnop/data/grf.hpp"

#include <cmath>
#include <random>

#include "lnop/data/fft.hpp"
#include "lnop/error.hpp"
#include "lnop/tensor/ops.hpp"

namespace lnop {

void GrfSpec::validate() const {
  if (!(alpha > 0.0)) throw ConfigError("GRF decay exponent alpha must be > 0, got " + std::to_string(alpha));
  if (!(tau >= 0.0)) throw ConfigError("GRF scale tau must be >= 0, got " + std::to_string(tau));
  if (!(sigma >= 0.0)) throw ConfigError("GRF amplitude sigma must be >= 0, got " + std::to_string(sigma));
}

double GrfSpec::amplitude(double freq_sq) const { return sigma * std::pow(freq_sq + tau * tau, -alpha / 2.0); }

Tensor grf_sample(const Shape& extents, const SpectralAmplitude& amplitude, std::uint64_t seed) {
  if (extents.empty() || extents.size() > 3) throw DimensionError("GRF supports 1 to 3 axes, got " + to_string(extents));
  for (auto e : extents) {
    if (e < 4) throw DimensionError("GRF extents must be >= 4, got " + to_string(extents));
  }
  const std::size_t n = numel(extents);
  const auto strides = strides_of(extents);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;

  std::vector<fft::Complex> raw(n);
  std::vector<long> freq(extents.size());
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t rem = i;
    for (std::size_t a = 0; a < extents.size(); ++a) {
      freq[a] = fft::signed_frequency(rem / strides[a], extents[a]);
      rem %= strides[a];
    }
    const double re = normal(rng);
    const double im = normal(rng);
    raw[i] = amplitude(freq) * fft::Complex(re, im);
  }

  std::vector<fft::Complex> coeffs(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t rem = i, mirror = 0;
    for (std::size_t a = 0; a < extents.size(); ++a) {
      const std::size_t idx = rem / strides[a];
      rem %= strides[a];
      mirror += ((extents[a] - idx) % extents[a]) * strides[a];
    }
    coeffs[i] = 0.5 * (raw[i] + std::conj(raw[mirror]));
  }
  coeffs[0] = 0.0;

  fft::inverse_complex(coeffs, extents);
  Tensor out(extents);
  for (std::size_t i = 0; i < n; ++i) out[i] = coeffs[i].real();
  require_finite(out, "grf_sample");
  return out;
}

Tensor grf_sample(const Shape& extents, const GrfSpec& spec, std::uint64_t seed) {
  spec.validate();
  return grf_sample(
      extents,
      [&spec](std::span<const long> f) {
        double sq = 0.0;
        for (long v : f) sq += static_cast<double>(v * v);
        return spec.amplitude(sq);
      },
      seed);
}

}  // namespace lnop
