#include "lnop/blocks/param_count.hpp"

#include "lnop/error.hpp"

namespace lnop {

Architecture parse_architecture(const std::string& name) {
  if (name == "learnable") return Architecture::learnable;
  if (name == "fourier") return Architecture::fourier;
  throw ConfigError("unknown architecture '" + name + "' (expected learnable|fourier)");
}

std::string to_string(Architecture arch) { return arch == Architecture::learnable ? "learnable" : "fourier"; }

BlockParamCount block_param_count(Architecture arch, std::uint64_t channels, const Shape& dims, const Shape& modes) {
  if (dims.size() != modes.size()) {
    throw DimensionError("param count needs matching dims " + to_string(dims) + " and modes " + to_string(modes));
  }
  std::uint64_t mode_product = 1;
  std::uint64_t axis_sum = 0;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    mode_product *= modes[i];
    axis_sum += static_cast<std::uint64_t>(dims[i]) * modes[i];
  }
  BlockParamCount c;
  c.channel = channels * channels;
  c.channel_bias = channels;
  if (arch == Architecture::learnable) {
    c.forward = axis_sum;
    c.inverse = axis_sum;
    c.mix = channels * channels * mode_product;
  } else {
    c.mix = 2 * channels * channels * mode_product;
  }
  return c;
}

std::int64_t fourier_minus_learnable(std::uint64_t channels, const Shape& dims, const Shape& modes) {
  const auto f = block_param_count(Architecture::fourier, channels, dims, modes).transform_total();
  const auto l = block_param_count(Architecture::learnable, channels, dims, modes).transform_total();
  return static_cast<std::int64_t>(f) - static_cast<std::int64_t>(l);
}

}  // namespace lnop
