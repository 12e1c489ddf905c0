#include "lnop/blocks/spectral.hpp"

#include <cmath>
#include <numbers>

#include "lnop/error.hpp"
#include "lnop/tensor/ops.hpp"

namespace lnop {

void validate_spectral_modes(const Shape& dims, const Shape& modes) {
  if (dims.empty() || dims.size() != modes.size()) {
    throw ModeError("need one mode count per axis: dims " + to_string(dims) + ", modes " + to_string(modes));
  }
  for (std::size_t i = 0; i < dims.size(); ++i) {
    const bool last = i + 1 == dims.size();
    const auto k = modes[i];
    if (k == 0 || (k > max_truncated_modes(dims[i]) && k != untruncated_modes(dims[i], last))) {
      throw ModeError("axis " + std::to_string(i) + ": " + std::to_string(k) + " modes not admissible for extent " +
                      std::to_string(dims[i]) + " (at most " + std::to_string(max_truncated_modes(dims[i])) +
                      ", or " + std::to_string(untruncated_modes(dims[i], last)) + " for no truncation)");
    }
  }
}

SpectralBasis::SpectralBasis(Shape dims, Shape modes) : dims_(std::move(dims)), modes_(std::move(modes)) {
  validate_spectral_modes(dims_, modes_);
  for (std::size_t a = 0; a < dims_.size(); ++a) {
    const std::size_t d = dims_[a], k = modes_[a];
    const bool last = a + 1 == dims_.size();
    Tensor fwd_re({d, k}), fwd_im({d, k}), inv_re({k, d}), inv_im({k, d});
    for (std::size_t x = 0; x < d; ++x) {
      for (std::size_t f = 0; f < k; ++f) {
        // reduce f*x mod d first so the phase stays exact for large grids
        const double phase = 2.0 * std::numbers::pi * static_cast<double>((f * x) % d) / static_cast<double>(d);
        const double c = std::cos(phase), s = std::sin(phase);
        fwd_re[x * k + f] = c;
        fwd_im[x * k + f] = -s;
        double w = 1.0 / static_cast<double>(d);
        if (last && f != 0 && 2 * f != d) w *= 2.0;
        inv_re[f * d + x] = w * c;
        inv_im[f * d + x] = w * s;
      }
    }
    axes_.push_back(Axis{Var(std::move(fwd_re)), Var(std::move(fwd_im)), Var(std::move(inv_re)), Var(std::move(inv_im))});
  }
}

namespace {

// (re + i im) * (a + i b) along one axis.
ComplexVar complex_contract(const ComplexVar& z, const Var& va, const Var& vb, std::size_t axis) {
  return {sub(contract_axis(z.re, va, axis), contract_axis(z.im, vb, axis)),
          add(contract_axis(z.re, vb, axis), contract_axis(z.im, va, axis))};
}

void check_axes(const Shape& shape, const Shape& expected, std::size_t first_axis, const char* what) {
  if (shape.size() != first_axis + expected.size()) {
    throw DimensionError(std::string(what) + ": input " + to_string(shape) + " does not have " +
                         std::to_string(expected.size()) + " transform axes after axis " + std::to_string(first_axis));
  }
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (shape[first_axis + i] != expected[i]) {
      throw DimensionError(std::string(what) + ": axis " + std::to_string(first_axis + i) + " has extent " +
                           std::to_string(shape[first_axis + i]) + ", expected " + std::to_string(expected[i]));
    }
  }
}

}  // namespace

ComplexVar dft_truncated(const Var& v, const SpectralBasis& basis, std::size_t first_axis) {
  check_axes(v.shape(), basis.dims(), first_axis, "dft_truncated");
  ComplexVar z{contract_axis(v, basis.forward_re(0), first_axis), contract_axis(v, basis.forward_im(0), first_axis)};
  for (std::size_t a = 1; a < basis.rank(); ++a) {
    z = complex_contract(z, basis.forward_re(a), basis.forward_im(a), first_axis + a);
  }
  return z;
}

Var idft_padded(const ComplexVar& z, const SpectralBasis& basis, std::size_t first_axis) {
  check_axes(z.re.shape(), basis.modes(), first_axis, "idft_padded");
  check_axes(z.im.shape(), basis.modes(), first_axis, "idft_padded");
  ComplexVar w = z;
  const std::size_t last = basis.rank() - 1;
  for (std::size_t a = 0; a < last; ++a) {
    w = complex_contract(w, basis.inverse_re(a), basis.inverse_im(a), first_axis + a);
  }
  // Real part of the Hermitian sum along the last axis.
  return sub(contract_axis(w.re, basis.inverse_re(last), first_axis + last),
             contract_axis(w.im, basis.inverse_im(last), first_axis + last));
}

ComplexTensor dft_truncated(const Tensor& v, const Shape& modes) {
  const SpectralBasis basis(v.shape(), modes);
  auto z = dft_truncated(Var::view(v), basis, 0);
  return {z.re.value(), z.im.value()};
}

Tensor idft_padded(const ComplexTensor& z, const Shape& dims) {
  const SpectralBasis basis(dims, z.re.shape());
  return idft_padded(ComplexVar{Var::view(z.re), Var::view(z.im)}, basis, 0).value();
}

ComplexVar complex_mode_mix(const ComplexVar& z, const Var& mix_re, const Var& mix_im) {
  return {sub(mode_mix(z.re, mix_re), mode_mix(z.im, mix_im)), add(mode_mix(z.re, mix_im), mode_mix(z.im, mix_re))};
}

SpectralBaselineParams SpectralBaselineParams::init(const BlockShape& shape, std::mt19937_64& rng, MixInit mix_init,
                                                    const std::string& prefix) {
  validate_spectral_modes(shape.dims, shape.modes);
  if (shape.channels == 0) throw ConfigError("block width d_v must be positive");
  SpectralBaselineParams p;
  p.shape = shape;
  const double c2 = static_cast<double>(shape.channels * shape.channels);
  std::uniform_real_distribution<double> mix_dist(0.0, 1.0 / c2);
  Tensor re(shape.mix_shape()), im(shape.mix_shape());
  for (auto& v : re.data()) v = mix_dist(rng);
  for (auto& v : im.data()) v = mix_dist(rng);
  if (mix_init == MixInit::identity_noise) {
    const std::size_t modes = numel(shape.modes);
    for (auto& v : re.data()) v -= 0.5 / c2;
    for (auto& v : im.data()) v -= 0.5 / c2;
    for (std::size_t i = 0; i < shape.channels; ++i)
      for (std::size_t m = 0; m < modes; ++m) re[(i * shape.channels + i) * modes + m] += 1.0;
  }
  p.mix_re = Parameter(prefix + "mix_re", std::move(re));
  p.mix_im = Parameter(prefix + "mix_im", std::move(im));
  const double bw = std::sqrt(1.0 / static_cast<double>(shape.channels));
  std::uniform_real_distribution<double> w_dist(-bw, bw);
  Tensor w({shape.channels, shape.channels}), b({shape.channels});
  for (auto& v : w.data()) v = w_dist(rng);
  for (auto& v : b.data()) v = w_dist(rng);
  p.channel = Parameter(prefix + "channel", std::move(w));
  p.channel_bias = Parameter(prefix + "channel_bias", std::move(b));
  return p;
}

std::vector<Parameter*> SpectralBaselineParams::parameters() { return {&mix_re, &mix_im, &channel, &channel_bias}; }

BoundSpectralBlock bind(SpectralBaselineParams& params, const ParamBinder& binder) {
  return {binder(params.mix_re), binder(params.mix_im), binder(params.channel), binder(params.channel_bias)};
}

BoundSpectralBlock bind(const SpectralBaselineParams& params) {
  return {Var::view(params.mix_re.value), Var::view(params.mix_im.value), Var::view(params.channel.value),
          Var::view(params.channel_bias.value)};
}

Var spectral_block_update(const Var& v, const BoundSpectralBlock& block, const SpectralBasis& basis,
                          Activation act) {
  const ComplexVar z = dft_truncated(v, basis, 1);
  const Var spectral = idft_padded(complex_mode_mix(z, block.mix_re, block.mix_im), basis, 1);
  return activate(add(channel_map(v, block.channel, block.channel_bias), spectral), act);
}

}  // namespace lnop
