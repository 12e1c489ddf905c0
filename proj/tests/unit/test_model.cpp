#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <random>

#include "lnop/error.hpp"
#include "lnop/model/operator_model.hpp"
#include "lnop/model/resample.hpp"
#include "lnop/model/superres.hpp"
#include "lnop/tensor/ops.hpp"
#include "lnop/verify/oracles.hpp"

using namespace lnop;

namespace {

ModelConfig small_config(Architecture arch, Shape dims, Shape modes, std::size_t blocks, std::uint64_t seed = 3) {
  ModelConfig c;
  c.arch = arch;
  c.width = 4;
  c.dims = std::move(dims);
  c.modes = std::move(modes);
  c.blocks = blocks;
  c.seed = seed;
  return c;
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("lnop_unit_" + name);
}

}  // namespace

TEST_CASE("avg_pool") {
  CHECK(avg_pool(Tensor::vector({1, 2, 3, 4}), {2}) == Tensor::vector({1.5, 3.5}));
  std::mt19937_64 rng(1);
  const Tensor x = verify::random_tensor({2, 4, 4}, rng);
  CHECK(avg_pool(x, {1, 1}) == x);
  const Tensor p = avg_pool(x, {2, 2});
  CHECK(p.shape() == Shape{2, 2, 2});
  for (std::size_t c = 0; c < 2; ++c)
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j) {
        double s = 0.0;
        for (std::size_t a = 0; a < 2; ++a)
          for (std::size_t b = 0; b < 2; ++b) s += x.at({c, 2 * i + a, 2 * j + b});
        CHECK(p.at({c, i, j}) == doctest::Approx(s / 4).epsilon(1e-15));
      }
  CHECK_THROWS_AS(avg_pool(Tensor({5}), {2}), ResolutionError);
}

TEST_CASE("interpolate") {
  CHECK(interpolate(Tensor::vector({1, 2}), {4}, InterpMode::nearest) == Tensor::vector({1, 1, 2, 2}));
  const Tensor lin = interpolate(Tensor::vector({0, 1}), {4}, InterpMode::linear);
  const Tensor want = Tensor::vector({0, 0.25, 0.75, 1});
  CHECK(max_abs_diff(lin, want) <= 1e-15);

  const Tensor c({1, 3, 5}, 2.5);
  for (auto mode : {InterpMode::nearest, InterpMode::bilinear}) {
    const Tensor up = interpolate(c, {6, 10}, mode);
    for (double v : up.data()) CHECK(v == 2.5);
  }
  const Tensor c3({2, 2, 2, 3}, -1.0);
  const Tensor up3 = interpolate(c3, {4, 4, 6}, InterpMode::trilinear);
  CHECK(up3.shape() == Shape{2, 4, 4, 6});
  for (double v : up3.data()) CHECK(v == -1.0);

  std::mt19937_64 rng(2);
  const Tensor x = verify::random_tensor({3, 4}, rng);
  const Tensor up = interpolate(x, {9, 8}, InterpMode::bilinear);
  const auto [lo, hi] = std::minmax_element(x.data().begin(), x.data().end());
  for (double v : up.data()) {
    CHECK(v >= *lo - 1e-15);
    CHECK(v <= *hi + 1e-15);
  }
  CHECK_THROWS_AS(interpolate(x, {9, 8}, InterpMode::linear), ConfigError);
  CHECK_THROWS_AS(interpolate(x, {9, 8}, InterpMode::trilinear), ConfigError);
}

TEST_CASE("positional channels") {
  const Tensor pe = positional_channels({3, 5});
  CHECK(pe.shape() == Shape{2, 3, 5});
  CHECK(pe.at({0, 2, 1}) == 1.0);
  CHECK(pe.at({1, 1, 2}) == 0.5);
  CHECK(pe.at({1, 0, 0}) == 0.0);
}

TEST_CASE("forward: zero network outputs the final bias") {
  OperatorModel m(small_config(Architecture::learnable, {8}, {3}, 2));
  auto ps = m.parameters();
  for (auto* p : ps) p->value.fill(0.0);
  ps.back()->value[0] = 0.75;
  std::mt19937_64 rng(4);
  const Tensor out = m.forward(verify::random_tensor({1, 8}, rng));
  for (double v : out.data()) CHECK(v == 0.75);
}

TEST_CASE("forward: single block equals hand composition") {
  OperatorModel m(small_config(Architecture::learnable, {8}, {3}, 1));
  const auto ps = m.parameters();
  REQUIRE(ps.size() == 11);
  TransformBlockParams blk;
  blk.shape = m.config().block_shape();
  blk.forward = {*ps[2]};
  blk.inverse = {*ps[3]};
  blk.mix = *ps[4];
  blk.channel = *ps[5];
  blk.channel_bias = *ps[6];
  std::mt19937_64 rng(5);
  const Tensor a = verify::random_tensor({1, 8}, rng);

  const Var lifted = channel_map(Var(m.with_positional_encoding(a)), Var(ps[0]->value), Var(ps[1]->value));
  const Tensor v1 = verify::naive_block_update(lifted.value(), blk);
  const Var h = relu(channel_map(Var(v1), Var(ps[7]->value), Var(ps[8]->value)));
  const Tensor want = channel_map(h, Var(ps[9]->value), Var(ps[10]->value)).value();
  CHECK(max_abs_diff(m.forward(a), want) <= 1e-12);
}

TEST_CASE("forward: nonlinear in the input") {
  OperatorModel m(small_config(Architecture::learnable, {8}, {3}, 2));
  std::mt19937_64 rng(6);
  const Tensor a = verify::random_tensor({1, 8}, rng);
  const Tensor u = m.forward(a);
  const Tensor u2 = m.forward(scale(a, 2.0));
  CHECK(max_abs_diff(u2, scale(u, 2.0)) > 1e-6);
}

TEST_CASE("forward: wrong grid points to forward_superres") {
  OperatorModel m(small_config(Architecture::learnable, {8}, {3}, 1));
  try {
    (void)m.forward(Tensor({1, 16}));
    FAIL("expected DimensionError");
  } catch (const DimensionError& e) {
    CHECK(std::string(e.what()).find("forward_superres") != std::string::npos);
  }
}

TEST_CASE("forward: tape and inference agree") {
  OperatorModel m(small_config(Architecture::fourier, {8, 6}, {3, 3}, 2));
  std::mt19937_64 rng(7);
  const Tensor a = verify::random_tensor({1, 8, 6}, rng);
  Tape tape;
  CHECK(m.forward(tape, a).value() == m.forward(a));
}

TEST_CASE("forward_superres") {
  std::mt19937_64 rng(8);
  SUBCASE("ratio 1 is bit-identical to forward") {
    for (auto arch : {Architecture::learnable, Architecture::fourier}) {
      OperatorModel m(small_config(arch, {8, 8}, {3, 3}, 2));
      const Tensor a = verify::random_tensor({1, 8, 8}, rng);
      CHECK(forward_superres(m, a) == m.forward(a));
    }
  }
  SUBCASE("1-D pipeline equals hand-composed pool, forward, nearest upsample, Q") {
    OperatorModel m(small_config(Architecture::learnable, {8}, {3}, 2));
    const Tensor a = verify::random_tensor({1, 16}, rng);
    Tensor pooled({1, 8});
    for (std::size_t i = 0; i < 8; ++i) pooled[i] = 0.5 * (a[2 * i] + a[2 * i + 1]);
    const Tensor hidden = m.forward_hidden(pooled);
    Tensor up({4, 16});
    for (std::size_t c = 0; c < 4; ++c)
      for (std::size_t x = 0; x < 16; ++x) up.at({c, x}) = hidden.at({c, x / 2});
    CHECK(max_abs_diff(forward_superres(m, a), m.project(up)) <= 1e-13);
  }
  SUBCASE("constant input preserved") {
    // Without coordinates and with R = 0 every stage is pointwise, so the
    // coarse output is constant and must be reproduced everywhere.
    ModelConfig c = small_config(Architecture::learnable, {4, 4}, {2, 2}, 2);
    c.positional_encoding = false;
    OperatorModel m(c);
    for (auto* p : m.parameters())
      if (p->name.find("mix") != std::string::npos) p->value.fill(0.0);
    CHECK(avg_pool(Tensor({1, 8, 8}, 0.3), {2, 2}) == Tensor({1, 4, 4}, 0.3));
    const Tensor coarse = m.forward(Tensor({1, 4, 4}, 0.3));
    const Tensor out = forward_superres(m, Tensor({1, 8, 8}, 0.3));
    for (std::size_t i = 0; i < 8; ++i)
      for (std::size_t j = 0; j < 8; ++j) CHECK(out.at({0, i, j}) == coarse.at({0, i / 2, j / 2}));
  }
  SUBCASE("non-integer ratio names both extents") {
    OperatorModel m(small_config(Architecture::learnable, {8}, {3}, 1));
    try {
      (void)forward_superres(m, Tensor({1, 12}));
      FAIL("expected ResolutionError");
    } catch (const ResolutionError& e) {
      const std::string msg = e.what();
      CHECK(msg.find("12") != std::string::npos);
      CHECK(msg.find("8") != std::string::npos);
    }
  }
}

TEST_CASE("full-model gradients match central differences") {
  for (auto arch : {Architecture::learnable, Architecture::fourier}) {
    for (const Shape& dims : {Shape{8}, Shape{8, 8}}) {
      ModelConfig c = small_config(arch, dims, Shape(dims.size(), 3), 2, 11);
      c.width = 2;
      OperatorModel m(c);
      std::mt19937_64 rng(12);
      Shape in{1};
      in.insert(in.end(), dims.begin(), dims.end());
      const auto res =
          verify::check_model_gradients(m, verify::random_tensor(in, rng), verify::random_tensor(in, rng));
      INFO(to_string(arch), " ", to_string(dims), " worst ", res.worst_rel, " at ", res.worst_param);
      CHECK(res.passed());
    }
  }
}

TEST_CASE("checkpoint round trip") {
  OperatorModel m(small_config(Architecture::learnable, {8, 4}, {3, 2}, 2));
  const auto path = temp_path("ckpt.lnop");
  save_checkpoint(m, path);
  const OperatorModel back = load_checkpoint(path);
  CHECK(back.config().to_json() == m.config().to_json());
  const auto a = m.parameters();
  const auto b = back.parameters();
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i]->value == b[i]->value);

  std::filesystem::resize_file(path, std::filesystem::file_size(path) - 8);
  CHECK_THROWS_AS(load_checkpoint(path), FormatError);
  std::filesystem::remove(path);
  std::filesystem::remove(path.string() + ".json");
}

TEST_CASE("model config validation") {
  CHECK_THROWS_AS(OperatorModel(small_config(Architecture::learnable, {8}, {9}, 1)), ModeError);
  CHECK_THROWS_AS(OperatorModel(small_config(Architecture::fourier, {8}, {6}, 1)), ModeError);
  CHECK_THROWS_AS(OperatorModel(small_config(Architecture::learnable, {8}, {3}, 0)), ConfigError);
}
