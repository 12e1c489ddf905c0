#pragma once

#include <cstdint>
#include <string>

#include "lnop/tensor/tensor.hpp"

namespace lnop {

enum class Architecture { learnable, fourier };

Architecture parse_architecture(const std::string& name);
std::string to_string(Architecture arch);

/// Per-block parameter counts, split the way the comparison tables do: the
/// forward transform, the mode mixing, the inverse transform, then the
/// pointwise channel map W (and its bias) which both architectures share.
struct BlockParamCount {
  std::uint64_t forward = 0;
  std::uint64_t mix = 0;
  std::uint64_t inverse = 0;
  std::uint64_t channel = 0;
  std::uint64_t channel_bias = 0;

  /// forward + mix + inverse; W is reported separately.
  std::uint64_t transform_total() const noexcept { return forward + mix + inverse; }
  std::uint64_t total() const noexcept { return transform_total() + channel + channel_bias; }
};

/// learnable: M = N = sum d_i k_i, R = d_v^2 prod k_i.
/// fourier:   M = N = 0, R = 2 d_v^2 prod k_i (complex weights).
BlockParamCount block_param_count(Architecture arch, std::uint64_t channels, const Shape& dims, const Shape& modes);

/// fourier.transform_total() - learnable.transform_total()
/// = d_v^2 prod k_i - 2 sum d_i k_i (may be negative).
std::int64_t fourier_minus_learnable(std::uint64_t channels, const Shape& dims, const Shape& modes);

}  // namespace lnop
