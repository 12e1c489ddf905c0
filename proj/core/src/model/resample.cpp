#include "lnop/model/resample.hpp"

#include <algorithm>
#include <cmath>

#include "lnop/error.hpp"

namespace lnop {
namespace {

struct Split {
  std::size_t outer, extent, inner;
};

Split split(const Shape& s, std::size_t axis) {
  Split r{1, s[axis], 1};
  for (std::size_t i = 0; i < axis; ++i) r.outer *= s[i];
  for (std::size_t i = axis + 1; i < s.size(); ++i) r.inner *= s[i];
  return r;
}

Tensor pool_axis(const Tensor& x, std::size_t axis, std::size_t factor) {
  const auto sp = split(x.shape(), axis);
  Shape out_shape = x.shape();
  out_shape[axis] = sp.extent / factor;
  Tensor out(out_shape);
  const double inv = 1.0 / static_cast<double>(factor);
  for (std::size_t o = 0; o < sp.outer; ++o)
    for (std::size_t j = 0; j < out_shape[axis]; ++j)
      for (std::size_t n = 0; n < sp.inner; ++n) {
        const auto at = [&](std::size_t t) { return x[(o * sp.extent + j * factor + t) * sp.inner + n]; };
        // mean as first + mean of offsets: exact on constant windows
        const double first = at(0);
        double lo = first, hi = first, acc = 0.0;
        for (std::size_t t = 1; t < factor; ++t) {
          const double v = at(t);
          acc += v - first;
          lo = std::min(lo, v);
          hi = std::max(hi, v);
        }
        out[(o * out_shape[axis] + j) * sp.inner + n] = std::clamp(first + acc * inv, lo, hi);
      }
  return out;
}

double source_coord(std::size_t dst, std::size_t d_src, std::size_t d_dst) {
  const double s = (static_cast<double>(dst) + 0.5) * static_cast<double>(d_src) / static_cast<double>(d_dst) - 0.5;
  return std::clamp(s, 0.0, static_cast<double>(d_src - 1));
}

Tensor resample_axis(const Tensor& x, std::size_t axis, std::size_t target, bool linear) {
  const auto sp = split(x.shape(), axis);
  Shape out_shape = x.shape();
  out_shape[axis] = target;
  Tensor out(out_shape);
  for (std::size_t j = 0; j < target; ++j) {
    const double s = source_coord(j, sp.extent, target);
    std::size_t i0, i1;
    double w = 0.0;
    if (linear) {
      i0 = static_cast<std::size_t>(std::floor(s));
      i1 = std::min(i0 + 1, sp.extent - 1);
      w = s - static_cast<double>(i0);
    } else {
      // round half toward the lower index
      i0 = static_cast<std::size_t>(std::ceil(s - 0.5));
      i1 = i0;
    }
    for (std::size_t o = 0; o < sp.outer; ++o)
      for (std::size_t n = 0; n < sp.inner; ++n) {
        const double a = x[(o * sp.extent + i0) * sp.inner + n];
        const double b = x[(o * sp.extent + i1) * sp.inner + n];
        const double v = a + w * (b - a);
        out[(o * target + j) * sp.inner + n] = std::clamp(v, std::min(a, b), std::max(a, b));
      }
  }
  return out;
}

}  // namespace

InterpMode parse_interp_mode(const std::string& name) {
  if (name == "nearest") return InterpMode::nearest;
  if (name == "linear") return InterpMode::linear;
  if (name == "bilinear") return InterpMode::bilinear;
  if (name == "trilinear") return InterpMode::trilinear;
  throw ConfigError("unknown interpolation mode '" + name + "'");
}

std::string to_string(InterpMode mode) {
  switch (mode) {
    case InterpMode::nearest: return "nearest";
    case InterpMode::linear: return "linear";
    case InterpMode::bilinear: return "bilinear";
    case InterpMode::trilinear: return "trilinear";
  }
  return "?";
}

InterpMode default_interp_mode(std::size_t spatial_rank) {
  switch (spatial_rank) {
    case 1: return InterpMode::nearest;
    case 2: return InterpMode::bilinear;
    case 3: return InterpMode::trilinear;
    default: throw ConfigError("no interpolation mode for spatial rank " + std::to_string(spatial_rank));
  }
}

Tensor avg_pool(const Tensor& x, const Shape& factors) {
  if (factors.size() > x.rank()) {
    throw ResolutionError("avg_pool: " + std::to_string(factors.size()) + " factors for tensor " + to_string(x.shape()));
  }
  const std::size_t first = x.rank() - factors.size();
  Tensor out = x;
  for (std::size_t i = 0; i < factors.size(); ++i) {
    const auto f = factors[i];
    const auto e = x.shape()[first + i];
    if (f == 0 || e % f != 0) {
      throw ResolutionError("avg_pool: extent " + std::to_string(e) + " of axis " + std::to_string(first + i) +
                            " is not divisible by factor " + std::to_string(f));
    }
    if (f > 1) out = pool_axis(out, first + i, f);
  }
  return out;
}

Tensor interpolate(const Tensor& x, const Shape& target, InterpMode mode) {
  const std::size_t arity = mode == InterpMode::linear ? 1 : mode == InterpMode::bilinear ? 2 : 3;
  if (mode != InterpMode::nearest && target.size() != arity) {
    throw ConfigError(to_string(mode) + " interpolation resamples " + std::to_string(arity) + " axes, got " +
                      std::to_string(target.size()));
  }
  if (target.empty() || target.size() > x.rank()) {
    throw ConfigError("interpolate: target " + to_string(target) + " incompatible with " + to_string(x.shape()));
  }
  const std::size_t first = x.rank() - target.size();
  Tensor out = x;
  for (std::size_t i = 0; i < target.size(); ++i) {
    if (target[i] == 0) throw ResolutionError("interpolate: zero target extent");
    if (target[i] == out.shape()[first + i]) continue;
    out = resample_axis(out, first + i, target[i], mode != InterpMode::nearest);
  }
  return out;
}

}  // namespace lnop
