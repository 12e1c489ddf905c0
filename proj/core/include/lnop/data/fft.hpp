#pragma once

#include <complex>
#include <memory>
#include <span>
#include <vector>

#include "lnop/tensor/tensor.hpp"

namespace lnop::fft {

using Complex = std::complex<double>;

/// Real <-> half-complex transforms on a fixed 1-D or 2-D periodic grid,
/// backed by FFTW plans that are created once and reused.
///
/// forward: X[f] = sum_x v[x] exp(-2 pi i f.x / N) (unnormalised), stored in
/// the (n_0, ..., n_last/2 + 1) half-spectrum layout.
/// inverse: applies the 1/N normalisation, so inverse(forward(v)) == v.
class RealTransform {
 public:
  explicit RealTransform(Shape extents);
  ~RealTransform();
  RealTransform(const RealTransform&) = delete;
  RealTransform& operator=(const RealTransform&) = delete;

  const Shape& extents() const noexcept { return extents_; }
  Shape spectrum_extents() const;
  std::size_t real_size() const noexcept { return real_size_; }
  std::size_t spectrum_size() const noexcept { return spectrum_size_; }

  void forward(std::span<const double> in, std::span<Complex> out);
  void inverse(std::span<const Complex> in, std::span<double> out);

 private:
  struct Plans;
  Shape extents_;
  std::size_t real_size_ = 0;
  std::size_t spectrum_size_ = 0;
  std::unique_ptr<Plans> plans_;
};

/// One-shot unnormalised complex inverse transform (sign +1) over all axes.
void inverse_complex(std::vector<Complex>& data, const Shape& extents);

/// Signed integer frequency of index i on an axis of extent n.
inline long signed_frequency(std::size_t i, std::size_t n) {
  return i <= n / 2 ? static_cast<long>(i) : static_cast<long>(i) - static_cast<long>(n);
}

}  // namespace lnop::fft
