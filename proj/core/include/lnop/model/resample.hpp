#pragma once

#include <string>

#include "lnop/tensor/tensor.hpp"

namespace lnop {

enum class InterpMode { nearest, linear, bilinear, trilinear };

InterpMode parse_interp_mode(const std::string& name);
std::string to_string(InterpMode mode);
/// nearest for one spatial axis, bilinear for two, trilinear for three.
InterpMode default_interp_mode(std::size_t spatial_rank);

/// Non-overlapping window means over the trailing factors.size() axes.
/// Each of those extents must be divisible by its factor.
Tensor avg_pool(const Tensor& x, const Shape& factors);

/// Resamples the trailing target.size() axes to `target`.
///
/// Source coordinate of output index j is (j + 0.5) * d_src / d_dst - 0.5,
/// clamped to [0, d_src - 1]. nearest rounds ties toward the lower index;
/// the linear modes weight neighbours separably. linear needs exactly one
/// resampled axis, bilinear two, trilinear three; nearest any number.
Tensor interpolate(const Tensor& x, const Shape& target, InterpMode mode);

}  // namespace lnop
