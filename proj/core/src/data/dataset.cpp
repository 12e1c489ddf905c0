#include "lnop/data/dataset.hpp"

#include "lnop/error.hpp"
#include "lnop/io/binary.hpp"

namespace lnop {
namespace {

constexpr std::uint32_t kDatasetVersion = 1;

Shape with_channels(std::size_t c, const Shape& extents) {
  Shape s{c};
  s.insert(s.end(), extents.begin(), extents.end());
  return s;
}

}  // namespace

std::string to_string(GridLayout layout) { return layout == GridLayout::node ? "node" : "cell"; }

GridLayout parse_grid_layout(const std::string& name) {
  if (name == "node") return GridLayout::node;
  if (name == "cell") return GridLayout::cell;
  throw FormatError("unknown grid layout '" + name + "'");
}

Shape GridSpec::at_resolution(std::size_t resolution) const {
  Shape s = extents;
  for (std::size_t a = 0; a < spatial_rank(); ++a) s[a] = resolution;
  return s;
}

Shape PdeDataset::input_shape() const { return with_channels(in_channels, grid.extents); }
Shape PdeDataset::target_shape() const { return with_channels(out_channels, grid.extents); }

void PdeDataset::validate() const {
  const Shape in = input_shape(), out = target_shape();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    if (s.input.shape() != in || s.target.shape() != out) {
      throw DimensionError("sample " + std::to_string(i) + " has shapes " + to_string(s.input.shape()) + " -> " +
                           to_string(s.target.shape()) + ", dataset declares " + to_string(in) + " -> " +
                           to_string(out));
    }
    if (!s.input.all_finite() || !s.target.all_finite()) {
      throw NumericalError("sample " + std::to_string(i) + " contains non-finite values");
    }
  }
}

void dataset_write(const std::filesystem::path& path, const PdeDataset& dataset) {
  dataset.validate();
  io::BinaryWriter w;
  w.put_magic("LNOP");
  w.put_u32(kDatasetVersion);
  w.put_u32(static_cast<std::uint32_t>(dataset.samples.size()));
  w.put_u32(static_cast<std::uint32_t>(dataset.grid.extents.size()));
  for (auto e : dataset.grid.extents) w.put_u32(static_cast<std::uint32_t>(e));
  w.put_u32(static_cast<std::uint32_t>(dataset.in_channels));
  w.put_u32(static_cast<std::uint32_t>(dataset.out_channels));
  for (const auto& s : dataset.samples) {
    w.put_f64s(s.input.data());
    w.put_f64s(s.target.data());
  }
  w.save(path);
  const nlohmann::json meta{{"kind", "dataset"},
                            {"version", kDatasetVersion},
                            {"name", dataset.name},
                            {"grid", {{"extents", dataset.grid.extents}, {"layout", to_string(dataset.grid.layout)},
                              {"time_axes", dataset.grid.time_axes}}},
                            {"in_channels", dataset.in_channels},
                            {"out_channels", dataset.out_channels},
                            {"count", dataset.samples.size()},
                            {"generator", dataset.generator}};
  io::write_text(io::sidecar_of(path), meta.dump(2) + "\n");
}

PdeDataset dataset_read(const std::filesystem::path& path) {
  auto r = io::BinaryReader::open(path);
  r.expect_magic("LNOP");
  const auto version = r.get_u32("version");
  if (version != kDatasetVersion) {
    throw FormatError("unsupported dataset version " + std::to_string(version) + " at byte offset 4");
  }
  PdeDataset ds;
  const auto count = r.get_u32("sample count");
  const auto rank = r.get_u32("rank");
  if (rank == 0 || rank > 8) throw FormatError("implausible rank " + std::to_string(rank) + " at byte offset 12");
  for (std::uint32_t i = 0; i < rank; ++i) ds.grid.extents.push_back(r.get_u32("extent"));
  ds.in_channels = r.get_u32("input channels");
  ds.out_channels = r.get_u32("target channels");
  const Shape in = ds.input_shape(), out = ds.target_shape();
  const std::size_t per_sample = 8 * (numel(in) + numel(out));
  if (per_sample == 0 || r.size() - r.offset() != per_sample * count) {
    throw FormatError("dataset payload is " + std::to_string(r.size() - r.offset()) + " bytes from byte offset " +
                      std::to_string(r.offset()) + ", header implies " + std::to_string(per_sample * count));
  }
  ds.samples.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    PdeSample s{Tensor(in), Tensor(out)};
    r.get_f64s(s.input.data(), "sample input");
    r.get_f64s(s.target.data(), "sample target");
    ds.samples.push_back(std::move(s));
  }
  r.expect_end();

  const auto side = io::sidecar_of(path);
  if (std::filesystem::exists(side)) {
    try {
      const auto meta = nlohmann::json::parse(io::read_text(side));
      if (meta.value("kind", "") != "dataset") throw FormatError("'" + side.string() + "' is not a dataset sidecar");
      ds.name = meta.value("name", "");
      ds.grid.layout = parse_grid_layout(meta.at("grid").at("layout").get<std::string>());
      ds.grid.time_axes = meta.at("grid").value("time_axes", std::size_t{0});
      if (ds.grid.time_axes >= ds.grid.extents.size()) throw FormatError("sidecar time_axes leaves no spatial axis");
      if (meta.at("grid").at("extents").get<Shape>() != ds.grid.extents) {
        throw FormatError("sidecar extents disagree with container header");
      }
      ds.generator = meta.value("generator", nlohmann::json::object());
    } catch (const nlohmann::json::exception& e) {
      throw FormatError("dataset sidecar '" + side.string() + "': " + e.what());
    }
  }
  ds.validate();
  return ds;
}

Tensor downsample_field(const Tensor& field, const Shape& extents, GridLayout layout) {
  const auto& shape = field.shape();
  if (shape.size() != extents.size() + 1) {
    throw DimensionError("downsample: field " + to_string(shape) + " vs target extents " + to_string(extents));
  }
  Shape stride(extents.size()), offset(extents.size());
  for (std::size_t a = 0; a < extents.size(); ++a) {
    const auto d = shape[a + 1], e = extents[a];
    if (e == 0 || d % e != 0) {
      throw ResolutionError("cannot subsample extent " + std::to_string(d) + " to " + std::to_string(e) +
                            ": not an integer divisor");
    }
    stride[a] = d / e;
    if (layout == GridLayout::cell) {
      if (stride[a] % 2 == 0) {
        throw ResolutionError("cell-centred grid " + std::to_string(d) + " -> " + std::to_string(e) +
                              " needs an odd stride to keep centres aligned");
      }
      offset[a] = (stride[a] - 1) / 2;
    }
  }
  Shape out_shape = with_channels(shape[0], extents);
  Tensor out(out_shape);
  const auto in_strides = strides_of(shape);
  const auto out_strides = strides_of(out_shape);
  for (std::size_t q = 0; q < out.size(); ++q) {
    std::size_t rem = q, src = 0;
    for (std::size_t a = 0; a < out_shape.size(); ++a) {
      const std::size_t idx = rem / out_strides[a];
      rem %= out_strides[a];
      src += (a == 0 ? idx : offset[a - 1] + idx * stride[a - 1]) * in_strides[a];
    }
    out[q] = field[src];
  }
  return out;
}

PdeDataset downsample(const PdeDataset& dataset, const Shape& extents) {
  if (extents == dataset.grid.extents) return dataset;
  if (extents.size() != dataset.grid.extents.size()) {
    throw DimensionError("downsample: rank of " + to_string(extents) + " differs from dataset grid " +
                         to_string(dataset.grid.extents));
  }
  for (std::size_t a = dataset.grid.spatial_rank(); a < extents.size(); ++a) {
    if (extents[a] != dataset.grid.extents[a]) throw ResolutionError("time axes cannot be resampled");
  }
  PdeDataset out = dataset;
  out.grid.extents = extents;
  for (auto& s : out.samples) {
    s.input = downsample_field(s.input, extents, dataset.grid.layout);
    s.target = downsample_field(s.target, extents, dataset.grid.layout);
  }
  return out;
}

PdeDataset take(const PdeDataset& dataset, std::size_t first, std::size_t count) {
  if (first + count > dataset.samples.size()) {
    throw ConfigError("requested samples [" + std::to_string(first) + ", " + std::to_string(first + count) +
                      ") but the dataset holds " + std::to_string(dataset.samples.size()));
  }
  PdeDataset out;
  out.name = dataset.name;
  out.grid = dataset.grid;
  out.in_channels = dataset.in_channels;
  out.out_channels = dataset.out_channels;
  out.generator = dataset.generator;
  out.samples.assign(dataset.samples.begin() + static_cast<std::ptrdiff_t>(first),
                     dataset.samples.begin() + static_cast<std::ptrdiff_t>(first + count));
  return out;
}

}  // namespace lnop
