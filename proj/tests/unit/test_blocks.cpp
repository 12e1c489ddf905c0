#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "lnop/blocks/param_count.hpp"
#include "lnop/blocks/spectral.hpp"
#include "lnop/blocks/transform_block.hpp"
#include "lnop/error.hpp"
#include "lnop/tensor/ops.hpp"
#include "lnop/verify/oracles.hpp"

using namespace lnop;

namespace {

TransformBlockParams random_block(std::size_t dv, Shape dims, Shape modes, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto p = TransformBlockParams::init({dv, dims, modes}, rng, MixInit::random, "b.");
  for (auto* q : p.parameters()) q->value = verify::random_tensor(q->value.shape(), rng);
  return p;
}

Tensor slice_channel(const Tensor& v, std::size_t c) {
  Shape s(v.shape().begin() + 1, v.shape().end());
  const std::size_t n = numel(s);
  Tensor out(s);
  for (std::size_t i = 0; i < n; ++i) out[i] = v[c * n + i];
  return out;
}

}  // namespace

TEST_CASE("forward transform M") {
  SUBCASE("identity factor") {
    std::mt19937_64 rng(1);
    const Tensor v = verify::random_tensor({2, 4}, rng);
    const Var f = Var(Tensor::identity(4));
    CHECK(forward_transform(Var(v), {&f, 1}).value() == v);
  }
  SUBCASE("all-ones factors sum the grid") {
    const std::vector<Var> f{Var(Tensor({2, 1}, 1.0)), Var(Tensor({3, 1}, 1.0))};
    const Tensor out = forward_transform(Var(Tensor({1, 2, 3}, 1.0)), f).value();
    CHECK(out.shape() == Shape{1, 1, 1});
    CHECK(out[0] == 6.0);
  }
  SUBCASE("random 2-D case against separable loop oracle") {
    const auto p = random_block(3, {5, 4}, {3, 2}, 7);
    std::mt19937_64 rng(8);
    const Tensor v = verify::random_tensor({3, 5, 4}, rng);
    const auto b = bind(p);
    std::vector<Tensor> fs{p.forward[0].value, p.forward[1].value};
    CHECK(max_abs_diff(forward_transform(Var(v), b.forward).value(), verify::naive_separable(v, fs)) <= 1e-12);
  }
  SUBCASE("extent mismatch") {
    const Var f = Var(Tensor({3, 2}));
    CHECK_THROWS_AS(forward_transform(Var(Tensor({1, 4})), {&f, 1}), DimensionError);
  }
}

TEST_CASE("mode mix R") {
  std::mt19937_64 rng(2);
  SUBCASE("one channel is an elementwise product") {
    const Tensor z = verify::random_tensor({1, 5}, rng);
    const Tensor r = verify::random_tensor({1, 1, 5}, rng);
    const Tensor out = mode_mix(Var(z), Var(r)).value();
    for (std::size_t m = 0; m < 5; ++m) CHECK(out[m] == z[m] * r[m]);
  }
  SUBCASE("identity per mode") {
    const Tensor z = verify::random_tensor({3, 2, 2}, rng);
    Tensor r({3, 3, 2, 2});
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t m = 0; m < 4; ++m) r[(i * 3 + i) * 4 + m] = 1.0;
    CHECK(mode_mix(Var(z), Var(r)).value() == z);
  }
  SUBCASE("d_v=2, k=2 hand loop") {
    const Tensor z = verify::random_tensor({2, 2}, rng);
    const Tensor r = verify::random_tensor({2, 2, 2}, rng);
    Tensor want({2, 2});
    for (std::size_t j = 0; j < 2; ++j)
      for (std::size_t m = 0; m < 2; ++m)
        for (std::size_t i = 0; i < 2; ++i) want.at({j, m}) += r.at({i, j, m}) * z.at({i, m});
    CHECK(max_abs_diff(mode_mix(Var(z), Var(r)).value(), want) <= 1e-15);
    CHECK(max_abs_diff(want, verify::naive_mode_mix(z, r)) <= 1e-15);
  }
}

TEST_CASE("inverse transform N") {
  std::mt19937_64 rng(3);
  SUBCASE("identity factors") {
    const Tensor z = verify::random_tensor({2, 3, 3}, rng);
    const std::vector<Var> b{Var(Tensor::identity(3)), Var(Tensor::identity(3))};
    CHECK(inverse_transform(Var(z), b).value() == z);
  }
  SUBCASE("fresh init is not an inverse of M") {
    std::mt19937_64 init(4);
    const auto p = TransformBlockParams::init({2, {8}, {8}}, init, MixInit::random, "");
    const Tensor v = verify::random_tensor({2, 8}, rng);
    const auto b = bind(p);
    const Tensor round = inverse_transform(forward_transform(Var(v), b.forward), b.inverse).value();
    CHECK(max_abs_diff(round, v) > 1e-3);
  }
  SUBCASE("random case against separable loop oracle") {
    const auto p = random_block(2, {6, 5}, {3, 4}, 9);
    const Tensor z = verify::random_tensor({2, 3, 4}, rng);
    std::vector<Tensor> fs{p.inverse[0].value, p.inverse[1].value};
    CHECK(max_abs_diff(inverse_transform(Var(z), bind(p).inverse).value(), verify::naive_separable(z, fs)) <= 1e-12);
  }
}

TEST_CASE("block update") {
  std::mt19937_64 rng(5);
  const Tensor v = verify::random_tensor({2, 6}, rng);
  SUBCASE("zero parameters give zero") {
    auto p = random_block(2, {6}, {3}, 1);
    for (auto* q : p.parameters()) q->value.fill(0.0);
    CHECK(block_update(Var(v), bind(p), Activation::relu).value() == Tensor({2, 6}));
  }
  SUBCASE("R = 0 reduces to relu(W.v + b)") {
    auto p = random_block(2, {6}, {3}, 2);
    p.mix.value.fill(0.0);
    const auto b = bind(p);
    const Tensor want = relu(channel_map(Var(v), b.channel, b.channel_bias)).value();
    CHECK(block_update(Var(v), b, Activation::relu).value() == want);
  }
  SUBCASE("random block matches composed oracles") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto p = random_block(3, {6, 4}, {3, 2}, seed);
      const Tensor x = verify::random_tensor({3, 6, 4}, rng);
      CHECK(max_abs_diff(block_update(Var(x), bind(p), Activation::relu).value(),
                         verify::naive_block_update(x, p)) <= 1e-12);
    }
  }
  SUBCASE("k > d rejected") {
    std::mt19937_64 init(0);
    CHECK_THROWS_AS(TransformBlockParams::init({2, {4}, {5}}, init, MixInit::random, ""), ModeError);
  }
}

TEST_CASE("truncated DFT") {
  SUBCASE("constant signal has DC only") {
    const auto z = dft_truncated(Tensor({8}, 1.5), {4});
    CHECK(z.re[0] == doctest::Approx(12.0).epsilon(1e-14));
    for (std::size_t f = 1; f < 4; ++f) {
      CHECK(std::abs(z.re[f]) < 1e-12);
      CHECK(std::abs(z.im[f]) < 1e-12);
    }
  }
  SUBCASE("single harmonic") {
    Tensor v({16});
    for (std::size_t x = 0; x < 16; ++x) v[x] = std::cos(2 * std::numbers::pi * x / 16.0);
    const auto z = dft_truncated(v, {8});
    for (std::size_t f = 0; f < 8; ++f) {
      const double mag = std::hypot(z.re[f], z.im[f]);
      if (f == 1) CHECK(mag == doctest::Approx(8.0).epsilon(1e-12));
      else CHECK(mag < 1e-12);
    }
  }
  SUBCASE("random length-8 signal against the O(n^2) sum") {
    std::mt19937_64 rng(11);
    const Tensor v = verify::random_tensor({8}, rng);
    const auto z = dft_truncated(v, {4});
    const auto want = verify::naive_dft(v, {4});
    for (std::size_t f = 0; f < 4; ++f) {
      CHECK(std::abs(std::complex<double>(z.re[f], z.im[f]) - want[f]) <= 1e-10);
    }
  }
  SUBCASE("2-D padded inverse against the direct sum") {
    std::mt19937_64 rng(12);
    const Shape dims{6, 8}, modes{3, 4};
    const Tensor v = verify::random_tensor(dims, rng);
    const auto z = dft_truncated(v, modes);
    const Tensor back = idft_padded(z, dims);
    CHECK(max_abs_diff(back, verify::naive_idft_padded(verify::naive_dft(v, modes), modes, dims)) <= 1e-10);
  }
  SUBCASE("untruncated round trip is exact") {
    std::mt19937_64 rng(13);
    const Shape dims{6, 7};
    const Tensor v = verify::random_tensor(dims, rng);
    const Shape full{untruncated_modes(6, false), untruncated_modes(7, true)};
    CHECK(max_abs_diff(idft_padded(dft_truncated(v, full), dims), v) <= 1e-12);
  }
  SUBCASE("mode admissibility") {
    CHECK_NOTHROW(validate_spectral_modes({8}, {4}));
    CHECK_NOTHROW(validate_spectral_modes({8}, {5}));
    CHECK_THROWS_AS(validate_spectral_modes({8}, {6}), ModeError);
    CHECK_THROWS_AS(validate_spectral_modes({8, 8}, {5, 4}), ModeError);
    CHECK_NOTHROW(validate_spectral_modes({8, 8}, {8, 5}));
  }
}

TEST_CASE("spectral block update") {
  std::mt19937_64 rng(21);
  const Shape dims{8};
  const Tensor v = verify::random_tensor({2, 8}, rng);
  std::mt19937_64 init(1);
  auto p = SpectralBaselineParams::init({2, dims, {3}}, init, MixInit::random, "");
  SUBCASE("R = 0 reduces to relu(W.v + b)") {
    p.mix_re.value.fill(0.0);
    p.mix_im.value.fill(0.0);
    const auto b = bind(p);
    const SpectralBasis basis(dims, {3});
    CHECK(spectral_block_update(Var(v), b, basis, Activation::relu).value() ==
          relu(channel_map(Var(v), b.channel, b.channel_bias)).value());
  }
  SUBCASE("untruncated identity R is a round trip") {
    const Shape full{untruncated_modes(8, true)};
    std::mt19937_64 g(2);
    auto q = SpectralBaselineParams::init({2, dims, full}, g, MixInit::random, "");
    q.mix_re.value.fill(0.0);
    q.mix_im.value.fill(0.0);
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t m = 0; m < full[0]; ++m) q.mix_re.value.at({i, i, m}) = 1.0;
    const auto b = bind(q);
    const Tensor want = relu(add(channel_map(Var(v), b.channel, b.channel_bias), Var(v))).value();
    CHECK(max_abs_diff(spectral_block_update(Var(v), b, SpectralBasis(dims, full), Activation::relu).value(), want) <=
          1e-10);
  }
  SUBCASE("random instance matches direct-sum spectral convolution") {
    const Shape modes{3};
    const auto b = bind(p);
    const Tensor got = spectral_block_update(Var(v), b, SpectralBasis(dims, modes), Activation::identity).value();
    std::vector<std::vector<std::complex<double>>> coeffs;
    for (std::size_t c = 0; c < 2; ++c) coeffs.push_back(verify::naive_dft(slice_channel(v, c), modes));
    const Tensor wv = channel_map(Var(v), b.channel, b.channel_bias).value();
    for (std::size_t j = 0; j < 2; ++j) {
      std::vector<std::complex<double>> mixed(3);
      for (std::size_t m = 0; m < 3; ++m)
        for (std::size_t i = 0; i < 2; ++i)
          mixed[m] += std::complex<double>(p.mix_re.value.at({i, j, m}), p.mix_im.value.at({i, j, m})) * coeffs[i][m];
      const Tensor spatial = verify::naive_idft_padded(mixed, modes, dims);
      for (std::size_t x = 0; x < 8; ++x) CHECK(std::abs(got.at({j, x}) - (wv.at({j, x}) + spatial[x])) <= 1e-12);
    }
  }
}

TEST_CASE("parameter counts") {
  const auto f1 = block_param_count(Architecture::fourier, 2, {8}, {4});
  const auto l1 = block_param_count(Architecture::learnable, 2, {8}, {4});
  CHECK(f1.transform_total() == 32);
  CHECK(l1.transform_total() == 80);

  const auto f2 = block_param_count(Architecture::fourier, 32, {64, 64}, {12, 12});
  const auto l2 = block_param_count(Architecture::learnable, 32, {64, 64}, {12, 12});
  CHECK(f2.transform_total() == 294912);
  CHECK(l2.transform_total() == 150528);
  CHECK(fourier_minus_learnable(32, {64, 64}, {12, 12}) == 144384);
  CHECK(f2.channel == l2.channel);

  SUBCASE("learnable < fourier exactly when d_v^2 prod k > 2 sum d k") {
    for (std::uint64_t dv : {1u, 2u, 4u, 8u, 16u})
      for (std::size_t d : {8u, 16u, 64u})
        for (std::size_t k : {1u, 2u, 4u, 8u}) {
          const auto f = block_param_count(Architecture::fourier, dv, {d}, {k});
          const auto l = block_param_count(Architecture::learnable, dv, {d}, {k});
          CHECK((l.transform_total() < f.transform_total()) == (dv * dv * k > 2 * d * k));
        }
  }
  SUBCASE("counts match the tensors actually allocated") {
    std::mt19937_64 rng(0);
    auto lp = TransformBlockParams::init({3, {10, 6}, {4, 3}}, rng, MixInit::random, "");
    std::uint64_t n = 0;
    for (auto* q : lp.parameters()) n += q->value.size();
    CHECK(n == block_param_count(Architecture::learnable, 3, {10, 6}, {4, 3}).total());
    auto sp = SpectralBaselineParams::init({3, {10, 6}, {4, 3}}, rng, MixInit::random, "");
    n = 0;
    for (auto* q : sp.parameters()) n += q->value.size();
    CHECK(n == block_param_count(Architecture::fourier, 3, {10, 6}, {4, 3}).total());
  }
}
