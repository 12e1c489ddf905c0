#include "lnop/blocks/transform_block.hpp"

#include <algorithm>
#include <cmath>

#include "lnop/error.hpp"
#include "lnop/tensor/ops.hpp"

namespace lnop {
namespace {

Tensor uniform(Shape shape, double lo, double hi, std::mt19937_64& rng) {
  Tensor t(std::move(shape));
  std::uniform_real_distribution<double> dist(lo, hi);
  for (auto& v : t.data()) v = dist(rng);
  return t;
}

}  // namespace

MixInit parse_mix_init(const std::string& name) {
  if (name == "random") return MixInit::random;
  if (name == "identity_noise") return MixInit::identity_noise;
  throw ConfigError("unknown mix init '" + name + "' (expected random|identity_noise)");
}

std::string to_string(MixInit init) { return init == MixInit::random ? "random" : "identity_noise"; }

Shape BlockShape::mix_shape() const {
  Shape s{channels, channels};
  s.insert(s.end(), modes.begin(), modes.end());
  return s;
}

void BlockShape::validate_learnable() const {
  if (channels == 0) throw ConfigError("block width d_v must be positive");
  if (dims.empty() || dims.size() != modes.size()) {
    throw ConfigError("block needs one transform dimension per spatial axis: dims " + to_string(dims) +
                      ", modes " + to_string(modes));
  }
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (modes[i] == 0 || modes[i] > dims[i]) {
      throw ModeError("transform dimension k_" + std::to_string(i) + "=" + std::to_string(modes[i]) +
                      " must lie in [1, d_" + std::to_string(i) + "=" + std::to_string(dims[i]) + "]");
    }
  }
}

TransformBlockParams TransformBlockParams::init(const BlockShape& shape, std::mt19937_64& rng, MixInit mix_init,
                                                const std::string& prefix) {
  shape.validate_learnable();
  TransformBlockParams p;
  p.shape = shape;
  for (std::size_t i = 0; i < shape.dims.size(); ++i) {
    const double bf = std::sqrt(1.0 / static_cast<double>(shape.dims[i]));
    p.forward.emplace_back(prefix + "forward" + std::to_string(i),
                           uniform({shape.dims[i], shape.modes[i]}, -bf, bf, rng));
  }
  for (std::size_t i = 0; i < shape.dims.size(); ++i) {
    const double bb = std::sqrt(1.0 / static_cast<double>(shape.modes[i]));
    p.inverse.emplace_back(prefix + "inverse" + std::to_string(i),
                           uniform({shape.modes[i], shape.dims[i]}, -bb, bb, rng));
  }
  const double c2 = static_cast<double>(shape.channels * shape.channels);
  Tensor mix = uniform(shape.mix_shape(), 0.0, 1.0 / c2, rng);
  if (mix_init == MixInit::identity_noise) {
    const std::size_t modes = numel(shape.modes);
    for (auto& v : mix.data()) v -= 0.5 / c2;
    for (std::size_t i = 0; i < shape.channels; ++i)
      for (std::size_t m = 0; m < modes; ++m) mix[(i * shape.channels + i) * modes + m] += 1.0;
  }
  p.mix = Parameter(prefix + "mix", std::move(mix));
  const double bw = std::sqrt(1.0 / static_cast<double>(shape.channels));
  p.channel = Parameter(prefix + "channel", uniform({shape.channels, shape.channels}, -bw, bw, rng));
  p.channel_bias = Parameter(prefix + "channel_bias", uniform({shape.channels}, -bw, bw, rng));
  return p;
}

std::vector<Parameter*> TransformBlockParams::parameters() {
  std::vector<Parameter*> out;
  for (auto& f : forward) out.push_back(&f);
  for (auto& b : inverse) out.push_back(&b);
  out.push_back(&mix);
  out.push_back(&channel);
  out.push_back(&channel_bias);
  return out;
}

BoundTransformBlock bind(TransformBlockParams& params, const ParamBinder& binder) {
  BoundTransformBlock b;
  for (auto& f : params.forward) b.forward.push_back(binder(f));
  for (auto& i : params.inverse) b.inverse.push_back(binder(i));
  b.mix = binder(params.mix);
  b.channel = binder(params.channel);
  b.channel_bias = binder(params.channel_bias);
  return b;
}

BoundTransformBlock bind(const TransformBlockParams& params) {
  BoundTransformBlock b;
  for (const auto& f : params.forward) b.forward.push_back(Var::view(f.value));
  for (const auto& i : params.inverse) b.inverse.push_back(Var::view(i.value));
  b.mix = Var::view(params.mix.value);
  b.channel = Var::view(params.channel.value);
  b.channel_bias = Var::view(params.channel_bias.value);
  return b;
}

Var forward_transform(const Var& v, std::span<const Var> forward) {
  if (v.shape().size() != forward.size() + 1) {
    throw DimensionError("forward transform expects input of rank " + std::to_string(forward.size() + 1) +
                         " (channels + spatial axes), got " + to_string(v.shape()));
  }
  Var z = v;
  for (std::size_t i = 0; i < forward.size(); ++i) {
    if (z.shape()[i + 1] != forward[i].shape()[0]) {
      throw DimensionError("forward transform: spatial axis " + std::to_string(i) + " has extent " +
                           std::to_string(z.shape()[i + 1]) + " but L_f expects " +
                           std::to_string(forward[i].shape()[0]));
    }
    z = contract_axis(z, forward[i], i + 1);
  }
  return z;
}

Var inverse_transform(const Var& z, std::span<const Var> inverse) {
  if (z.shape().size() != inverse.size() + 1) {
    throw DimensionError("inverse transform expects input of rank " + std::to_string(inverse.size() + 1) +
                         ", got " + to_string(z.shape()));
  }
  Var v = z;
  for (std::size_t i = 0; i < inverse.size(); ++i) {
    if (v.shape()[i + 1] != inverse[i].shape()[0]) {
      throw DimensionError("inverse transform: mode axis " + std::to_string(i) + " has extent " +
                           std::to_string(v.shape()[i + 1]) + " but L_b expects " +
                           std::to_string(inverse[i].shape()[0]));
    }
    v = contract_axis(v, inverse[i], i + 1);
  }
  return v;
}

Var mode_mix(const Var& z, const Var& mix) {
  const auto& zs = z.shape();
  const auto& rs = mix.shape();
  if (zs.empty() || rs.size() != zs.size() + 1 || rs[0] != zs[0] || rs[1] != zs[0] ||
      !std::equal(zs.begin() + 1, zs.end(), rs.begin() + 2)) {
    throw DimensionError("mode_mix: input " + to_string(zs) + " incompatible with mixing tensor " + to_string(rs));
  }
  Tape* tape = common_tape({&z, &mix});
  const std::size_t c = zs[0];
  const std::size_t modes = z.value().size() / c;
  Tensor out(zs);
  const double* zp = z.value().raw();
  const double* rp = mix.value().raw();
  for (std::size_t i = 0; i < c; ++i) {
    const double* zi = zp + i * modes;
    for (std::size_t j = 0; j < c; ++j) {
      const double* rij = rp + (i * c + j) * modes;
      double* oj = out.raw() + j * modes;
      for (std::size_t m = 0; m < modes; ++m) oj[m] += rij[m] * zi[m];
    }
  }
  require_finite(out, "mode_mix");
  if (!tape) return Var(std::move(out));
  return tape->record(std::move(out), {z, mix}, [z, mix, c, modes](const Tensor& g, GradAccess& grads) {
    const double* zp = z.value().raw();
    const double* rp = mix.value().raw();
    if (grads.needed(0)) {
      double* dz = grads.at(0).raw();
      for (std::size_t i = 0; i < c; ++i)
        for (std::size_t j = 0; j < c; ++j) {
          const double* rij = rp + (i * c + j) * modes;
          const double* gj = g.raw() + j * modes;
          for (std::size_t m = 0; m < modes; ++m) dz[i * modes + m] += rij[m] * gj[m];
        }
    }
    if (grads.needed(1)) {
      double* dr = grads.at(1).raw();
      for (std::size_t i = 0; i < c; ++i)
        for (std::size_t j = 0; j < c; ++j) {
          double* drij = dr + (i * c + j) * modes;
          const double* gj = g.raw() + j * modes;
          for (std::size_t m = 0; m < modes; ++m) drij[m] += zp[i * modes + m] * gj[m];
        }
    }
  });
}

Var channel_map(const Var& v, const Var& weight, const Var& bias) {
  return add_bias(contract_axis(v, weight, 0), bias, 0);
}

Var activate(const Var& x, Activation act) { return act == Activation::relu ? relu(x) : x; }

Var block_update(const Var& v, const BoundTransformBlock& block, Activation act) {
  Var spectral = inverse_transform(mode_mix(forward_transform(v, block.forward), block.mix), block.inverse);
  if (spectral.shape() != v.shape()) {
    throw DimensionError("block output " + to_string(spectral.shape()) + " does not match input " +
                         to_string(v.shape()));
  }
  return activate(add(channel_map(v, block.channel, block.channel_bias), spectral), act);
}

}  // namespace lnop
