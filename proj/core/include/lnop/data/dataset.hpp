#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lnop/tensor/tensor.hpp"

namespace lnop {

/// Where the samples live on [0, 1)^n (or the family's domain).
/// node: x_i = i / d (periodic grids). cell: x_i = (i + 1/2) / d.
enum class GridLayout { node, cell };

std::string to_string(GridLayout layout);
GridLayout parse_grid_layout(const std::string& name);

struct GridSpec {
  Shape extents;
  GridLayout layout = GridLayout::node;
  /// Trailing axes that index time rather than space (never resampled).
  std::size_t time_axes = 0;

  std::size_t spatial_rank() const noexcept { return extents.size() - time_axes; }
  /// Extents with every spatial axis set to `resolution`.
  Shape at_resolution(std::size_t resolution) const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// One (a, u) pair, channel-first: input (c_in, extents...), target
/// (c_out, extents...).
struct PdeSample {
  Tensor input;
  Tensor target;
};

struct PdeDataset {
  std::string name;
  GridSpec grid;
  std::size_t in_channels = 1;
  std::size_t out_channels = 1;
  std::vector<PdeSample> samples;
  /// Fully resolved generator configuration, including the seed.
  nlohmann::json generator = nlohmann::json::object();

  Shape input_shape() const;
  Shape target_shape() const;
  /// Throws DimensionError / NumericalError on inconsistent or non-finite samples.
  void validate() const;
};

/// Little-endian container: "LNOP", u32 version, u32 sample count, u32 rank,
/// u32 extents[rank], u32 c_in, u32 c_out, then f64 payload (input then
/// target for each sample). Metadata goes to `<path>.json`.
void dataset_write(const std::filesystem::path& path, const PdeDataset& dataset);
PdeDataset dataset_read(const std::filesystem::path& path);

/// Subsample to `extents` by integer strides s_i = d_i / e_i. Node grids take
/// every s-th point from 0; cell grids need odd s and take the centre point
/// (offset (s - 1) / 2) so cell centres stay aligned.
PdeDataset downsample(const PdeDataset& dataset, const Shape& extents);
Tensor downsample_field(const Tensor& field, const Shape& extents, GridLayout layout);

/// First `count` samples (or all of them) as a new dataset.
PdeDataset take(const PdeDataset& dataset, std::size_t first, std::size_t count);

}  // namespace lnop
