#include "lnop/model/operator_model.hpp"

#include <cmath>
#include <random>

#include "lnop/error.hpp"
#include "lnop/io/binary.hpp"
#include "lnop/tensor/ops.hpp"

namespace lnop {
namespace {

Tensor uniform(Shape shape, double bound, std::mt19937_64& rng) {
  Tensor t(std::move(shape));
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (auto& v : t.data()) v = dist(rng);
  return t;
}

Parameter linear_weight(const std::string& name, std::size_t in, std::size_t out, std::mt19937_64& rng) {
  return Parameter(name, uniform({in, out}, std::sqrt(1.0 / static_cast<double>(in)), rng));
}

Parameter linear_bias(const std::string& name, std::size_t in, std::size_t out, std::mt19937_64& rng) {
  return Parameter(name, uniform({out}, std::sqrt(1.0 / static_cast<double>(in)), rng));
}

Shape spatial_of(const Tensor& t) { return Shape(t.shape().begin() + 1, t.shape().end()); }

}  // namespace

std::size_t ModelConfig::lift_inputs() const noexcept {
  return in_channels + (positional_encoding ? dims.size() : 0);
}

void ModelConfig::validate() const {
  if (dims.empty() || dims.size() > 3) throw ConfigError("model needs 1 to 3 spatial axes, got " + to_string(dims));
  if (modes.size() != dims.size()) {
    throw ConfigError("model.modes " + to_string(modes) + " must have one entry per axis of " + to_string(dims));
  }
  for (auto d : dims)
    if (d < 2) throw ConfigError("grid extents must be >= 2, got " + to_string(dims));
  if (in_channels == 0 || out_channels == 0 || width == 0) throw ConfigError("channel counts must be positive");
  if (blocks == 0) throw ConfigError("model.blocks must be >= 1");
  if (arch == Architecture::learnable) {
    block_shape().validate_learnable();
  } else {
    validate_spectral_modes(dims, modes);
  }
}

nlohmann::json ModelConfig::to_json() const {
  return {{"arch", to_string(arch)},
          {"in_channels", in_channels},
          {"width", width},
          {"out_channels", out_channels},
          {"dims", dims},
          {"modes", modes},
          {"blocks", blocks},
          {"positional_encoding", positional_encoding},
          {"mix_init", to_string(mix_init)},
          {"seed", seed}};
}

ModelConfig ModelConfig::from_json(const nlohmann::json& j) {
  ModelConfig c;
  try {
    c.arch = parse_architecture(j.at("arch").get<std::string>());
    c.in_channels = j.at("in_channels").get<std::size_t>();
    c.width = j.at("width").get<std::size_t>();
    c.out_channels = j.at("out_channels").get<std::size_t>();
    c.dims = j.at("dims").get<Shape>();
    c.modes = j.at("modes").get<Shape>();
    c.blocks = j.at("blocks").get<std::size_t>();
    c.positional_encoding = j.at("positional_encoding").get<bool>();
    c.mix_init = parse_mix_init(j.at("mix_init").get<std::string>());
    c.seed = j.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("model metadata: ") + e.what());
  }
  return c;
}

struct OperatorModel::Bound {
  Var lift_weight, lift_bias;
  std::vector<BoundTransformBlock> learnable;
  std::vector<BoundSpectralBlock> fourier;
  Var proj_hidden_weight, proj_hidden_bias, proj_out_weight, proj_out_bias;
};

OperatorModel::OperatorModel(ModelConfig config) : config_(std::move(config)) {
  config_.validate();
  std::mt19937_64 rng(config_.seed);
  const auto lin = config_.lift_inputs();
  const auto w = config_.width;
  lift_weight_ = linear_weight("lift.weight", lin, w, rng);
  lift_bias_ = linear_bias("lift.bias", lin, w, rng);
  for (std::size_t t = 0; t < config_.blocks; ++t) {
    const std::string prefix = "block" + std::to_string(t) + ".";
    if (config_.arch == Architecture::learnable) {
      learnable_blocks_.push_back(TransformBlockParams::init(config_.block_shape(), rng, config_.mix_init, prefix));
    } else {
      fourier_blocks_.push_back(SpectralBaselineParams::init(config_.block_shape(), rng, config_.mix_init, prefix));
    }
  }
  const auto hid = config_.projection_hidden();
  proj_hidden_weight_ = linear_weight("proj.hidden.weight", w, hid, rng);
  proj_hidden_bias_ = linear_bias("proj.hidden.bias", w, hid, rng);
  proj_out_weight_ = linear_weight("proj.out.weight", hid, config_.out_channels, rng);
  proj_out_bias_ = linear_bias("proj.out.bias", hid, config_.out_channels, rng);
}

std::vector<Parameter*> OperatorModel::parameters() {
  std::vector<Parameter*> out{&lift_weight_, &lift_bias_};
  for (auto& b : learnable_blocks_)
    for (auto* p : b.parameters()) out.push_back(p);
  for (auto& b : fourier_blocks_)
    for (auto* p : b.parameters()) out.push_back(p);
  for (auto* p : {&proj_hidden_weight_, &proj_hidden_bias_, &proj_out_weight_, &proj_out_bias_}) out.push_back(p);
  return out;
}

std::vector<const Parameter*> OperatorModel::parameters() const {
  auto mut = const_cast<OperatorModel*>(this)->parameters();
  return {mut.begin(), mut.end()};
}

std::size_t OperatorModel::parameter_count() const {
  std::size_t n = 0;
  for (const auto* p : parameters()) n += p->value.size();
  return n;
}

BlockParamCount OperatorModel::block_params() const {
  return block_param_count(config_.arch, config_.width, config_.dims, config_.modes);
}

OperatorModel::Bound OperatorModel::bind(const ParamBinder& binder) {
  Bound b;
  b.lift_weight = binder(lift_weight_);
  b.lift_bias = binder(lift_bias_);
  for (auto& blk : learnable_blocks_) b.learnable.push_back(lnop::bind(blk, binder));
  for (auto& blk : fourier_blocks_) b.fourier.push_back(lnop::bind(blk, binder));
  b.proj_hidden_weight = binder(proj_hidden_weight_);
  b.proj_hidden_bias = binder(proj_hidden_bias_);
  b.proj_out_weight = binder(proj_out_weight_);
  b.proj_out_bias = binder(proj_out_bias_);
  return b;
}

OperatorModel::Bound OperatorModel::bind() const {
  Bound b;
  b.lift_weight = Var::view(lift_weight_.value);
  b.lift_bias = Var::view(lift_bias_.value);
  for (const auto& blk : learnable_blocks_) b.learnable.push_back(lnop::bind(blk));
  for (const auto& blk : fourier_blocks_) b.fourier.push_back(lnop::bind(blk));
  b.proj_hidden_weight = Var::view(proj_hidden_weight_.value);
  b.proj_hidden_bias = Var::view(proj_hidden_bias_.value);
  b.proj_out_weight = Var::view(proj_out_weight_.value);
  b.proj_out_bias = Var::view(proj_out_bias_.value);
  return b;
}

Tensor positional_channels(const Shape& grid) {
  Shape shape{grid.size()};
  shape.insert(shape.end(), grid.begin(), grid.end());
  Tensor out(shape);
  const std::size_t points = numel(grid);
  const auto strides = strides_of(grid);
  for (std::size_t axis = 0; axis < grid.size(); ++axis) {
    const double denom = static_cast<double>(grid[axis] - 1);
    for (std::size_t p = 0; p < points; ++p) {
      const std::size_t idx = (p / strides[axis]) % grid[axis];
      out[axis * points + p] = denom > 0.0 ? static_cast<double>(idx) / denom : 0.0;
    }
  }
  return out;
}

Tensor OperatorModel::with_positional_encoding(const Tensor& input) const {
  if (!config_.positional_encoding) return input;
  const Shape grid = spatial_of(input);
  const Tensor pe = positional_channels(grid);
  Shape shape = input.shape();
  shape[0] += grid.size();
  Tensor out(shape);
  std::copy(input.data().begin(), input.data().end(), out.data().begin());
  std::copy(pe.data().begin(), pe.data().end(), out.data().begin() + static_cast<std::ptrdiff_t>(input.size()));
  return out;
}

void OperatorModel::check_input(const Tensor& input, bool any_grid) const {
  const auto& s = input.shape();
  if (s.size() != config_.dims.size() + 1 || s[0] != config_.in_channels) {
    throw DimensionError("model expects input (d_a=" + std::to_string(config_.in_channels) + ", " +
                         std::to_string(config_.dims.size()) + " spatial axes), got " + to_string(s));
  }
  if (!any_grid && spatial_of(input) != config_.dims) {
    throw DimensionError("input grid " + to_string(spatial_of(input)) + " differs from training grid " +
                         to_string(config_.dims) + "; use forward_superres for other resolutions");
  }
}

Var OperatorModel::run_hidden(const Bound& b, const Tensor& input, const Shape& grid) const {
  Var v = channel_map(Var(with_positional_encoding(input)), b.lift_weight, b.lift_bias);
  if (config_.arch == Architecture::learnable) {
    for (const auto& blk : b.learnable) v = block_update(v, blk, Activation::relu);
  } else {
    const SpectralBasis basis(grid, config_.modes);
    for (const auto& blk : b.fourier) v = spectral_block_update(v, blk, basis, Activation::relu);
  }
  return v;
}

Var OperatorModel::run_projection(const Bound& b, const Var& hidden) const {
  const Var h = relu(channel_map(hidden, b.proj_hidden_weight, b.proj_hidden_bias));
  return channel_map(h, b.proj_out_weight, b.proj_out_bias);
}

Var OperatorModel::forward(Tape& tape, const Tensor& input) {
  check_input(input, false);
  const Bound b = bind(ParamBinder(&tape));
  return run_projection(b, run_hidden(b, input, config_.dims));
}

Tensor OperatorModel::forward(const Tensor& input) const {
  check_input(input, false);
  const Bound b = bind();
  return run_projection(b, run_hidden(b, input, config_.dims)).value();
}

Tensor OperatorModel::forward_hidden(const Tensor& input) const {
  check_input(input, false);
  return run_hidden(bind(), input, config_.dims).value();
}

Tensor OperatorModel::project(const Tensor& hidden) const {
  if (hidden.rank() != config_.dims.size() + 1 || hidden.shape()[0] != config_.width) {
    throw DimensionError("projection expects (d_v=" + std::to_string(config_.width) + ", grid), got " +
                         to_string(hidden.shape()));
  }
  return run_projection(bind(), Var::view(hidden)).value();
}

Tensor OperatorModel::forward_native(const Tensor& input) const {
  if (config_.arch != Architecture::fourier) {
    throw ConfigError("native resolution transfer needs the fourier architecture; use forward_superres");
  }
  check_input(input, true);
  const Bound b = bind();
  return run_projection(b, run_hidden(b, input, spatial_of(input))).value();
}

// Checkpoint: "LNOP", u32 version, u32 tensor count, then per tensor
// u32 rank, u32 extents[rank], f64 data; metadata in a JSON sidecar.
namespace {
constexpr std::uint32_t kCheckpointVersion = 1;

}  // namespace

void save_checkpoint(const OperatorModel& model, const std::filesystem::path& path) {
  io::BinaryWriter w;
  const auto params = model.parameters();
  w.put_magic("LNOP");
  w.put_u32(kCheckpointVersion);
  w.put_u32(static_cast<std::uint32_t>(params.size()));
  nlohmann::json names = nlohmann::json::array();
  for (const auto* p : params) {
    w.put_u32(static_cast<std::uint32_t>(p->value.rank()));
    for (auto e : p->value.shape()) w.put_u32(static_cast<std::uint32_t>(e));
    w.put_f64s(p->value.data());
    names.push_back(p->name);
  }
  w.save(path);
  nlohmann::json meta{{"kind", "checkpoint"},
                      {"version", kCheckpointVersion},
                      {"model", model.config().to_json()},
                      {"parameters", names},
                      {"w_bias", true},
                      {"pq_bias", true}};
  io::write_text(io::sidecar_of(path), meta.dump(2) + "\n");
}

OperatorModel load_checkpoint(const std::filesystem::path& path) {
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(io::read_text(io::sidecar_of(path)));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("checkpoint sidecar '" + io::sidecar_of(path).string() + "': " + e.what());
  }
  if (meta.value("kind", "") != "checkpoint") throw FormatError("'" + path.string() + "' is not a checkpoint");
  OperatorModel model(ModelConfig::from_json(meta.at("model")));
  auto r = io::BinaryReader::open(path);
  r.expect_magic("LNOP");
  const auto version = r.get_u32("version");
  if (version != kCheckpointVersion) throw FormatError("unsupported checkpoint version " + std::to_string(version));
  auto params = model.parameters();
  const auto count = r.get_u32("tensor count");
  if (count != params.size()) {
    throw FormatError("checkpoint holds " + std::to_string(count) + " tensors, model expects " +
                      std::to_string(params.size()));
  }
  for (auto* p : params) {
    const auto at = r.offset();
    const auto rank = r.get_u32("tensor rank");
    Shape shape;
    for (std::uint32_t i = 0; i < rank; ++i) shape.push_back(r.get_u32("tensor extent"));
    if (shape != p->value.shape()) {
      throw FormatError("tensor at byte offset " + std::to_string(at) + " has shape " + to_string(shape) +
                        ", parameter '" + p->name + "' expects " + to_string(p->value.shape()));
    }
    r.get_f64s(p->value.data(), p->name);
  }
  r.expect_end();
  return model;
}

}  // namespace lnop
