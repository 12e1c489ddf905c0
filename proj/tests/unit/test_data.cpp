#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <numeric>

#include "lnop/data/dataset.hpp"
#include "lnop/data/fft.hpp"
#include "lnop/data/generators.hpp"
#include "lnop/data/grf.hpp"
#include "lnop/data/solvers.hpp"
#include "lnop/error.hpp"
#include "lnop/io/binary.hpp"
#include "lnop/tensor/ops.hpp"
#include "lnop/verify/oracles.hpp"
#include "lnop/verify/suites.hpp"

using namespace lnop;

namespace {

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("lnop_unit_" + name);
}

void remove_container(const std::filesystem::path& p) {
  std::filesystem::remove(p);
  std::filesystem::remove(io::sidecar_of(p));
}

double mean(std::span<const double> v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); }

}  // namespace

TEST_CASE("grf: zero spectrum gives the zero field") {
  const Tensor f = grf_sample({16}, [](std::span<const long>) { return 0.0; }, 1);
  for (double v : f.data()) CHECK(v == 0.0);
}

TEST_CASE("grf: mean removed and deterministic") {
  for (const Shape& ext : {Shape{64}, Shape{16, 16}}) {
    const Tensor f = grf_sample(ext, GrfSpec{}, 5);
    CHECK(std::abs(mean(f.data())) <= 1e-10);
    CHECK(f == grf_sample(ext, GrfSpec{}, 5));
    CHECK_FALSE(f == grf_sample(ext, GrfSpec{}, 6));
  }
  CHECK_THROWS_AS(grf_sample({2}, GrfSpec{}, 0), DimensionError);
  CHECK_THROWS_AS(grf_sample({8}, GrfSpec{.alpha = 0.0}, 0), ConfigError);
}

TEST_CASE("grf: empirical spectrum slope matches -alpha") {
  const std::size_t n = 256;
  const GrfSpec spec{.alpha = 2.0, .tau = 1.0, .sigma = 1.0};
  fft::RealTransform dft({n});
  std::vector<double> power(n / 2 + 1, 0.0);
  std::vector<fft::Complex> coeffs(n / 2 + 1);
  for (std::uint64_t seed = 0; seed < 64; ++seed) {
    const Tensor f = grf_sample({n}, spec, seed);
    dft.forward(f.data(), coeffs);
    for (std::size_t k = 0; k < coeffs.size(); ++k) power[k] += std::norm(coeffs[k]);
  }
  // Least squares of log(rms amplitude) on log f over the power-law range.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int count = 0;
  for (std::size_t k = 8; k <= 64; ++k) {
    const double x = std::log(static_cast<double>(k));
    const double y = 0.5 * std::log(power[k] / 64.0);
    sx += x, sy += y, sxx += x * x, sxy += x * y, ++count;
  }
  const double slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
  CHECK(std::abs(slope + spec.alpha) <= 0.15 * spec.alpha);
}

TEST_CASE("burgers") {
  SUBCASE("zero stays zero") {
    const auto r = burgers_solve(Tensor({64}), {});
    for (double v : r.u.data()) CHECK(v == 0.0);
  }
  SUBCASE("energy is non-increasing and the solve is deterministic") {
    const Tensor u0 = grf_sample({256}, GrfSpec{.alpha = 2.0, .tau = 5.0 / (2 * std::numbers::pi), .sigma = 0.6}, 3);
    const auto a = burgers_solve(u0, {.nu = 1e-2});
    for (std::size_t i = 1; i < a.energy.size(); ++i) CHECK(a.energy[i] <= a.energy[i - 1] * (1 + 1e-12));
    CHECK(a.u == burgers_solve(u0, {.nu = 1e-2}).u);
  }
  SUBCASE("Richardson refinement") { CHECK(verify::burgers_richardson_discrepancy() <= 1e-6); }
  SUBCASE("collapsed step is a solver error") {
    Tensor huge({16}, 0.0);
    huge[3] = 1e12;
    CHECK_THROWS_AS(burgers_solve(huge, {}), SolverError);
  }
}

TEST_CASE("advection") {
  AdvectionParams p;
  p.center = 0.25;
  p.width = 0.2;
  const std::size_t m = 64;
  SUBCASE("t = 0 and full wrap") {
    const auto a = advection_solution(p, 0.0, m);
    CHECK(a.ut == a.u0);
    const auto b = advection_solution(p, 1.0, m);
    CHECK(max_abs_diff(b.ut, b.u0) <= 1e-12);
  }
  SUBCASE("half shift recentres the square wave at 0.75") {
    AdvectionParams q = p;
    q.center = 0.2513;
    const auto s = advection_solution(q, 0.5, m);
    for (std::size_t i = 0; i < m; ++i) CHECK(std::abs(s.ut[i] - s.u0[(i + m / 2) % m]) <= 1e-12);
    const double x = 0.7513;
    CHECK(s.ut[static_cast<std::size_t>(std::lround(x * m))] >= q.height);
  }
  SUBCASE("invalid width") {
    AdvectionParams bad = p;
    bad.width = 1.5;
    CHECK_THROWS_AS(advection_solution(bad, 0.1, m), ConfigError);
  }
  CHECK(verify::advection_shift_error() <= 1e-12);
}

TEST_CASE("darcy") {
  SUBCASE("unit coefficient: symmetry and maximum principle") {
    const auto r = darcy_solve(Tensor({16, 16}, 1.0));
    CHECK(r.relative_residual <= 1e-10);
    double peak = -1;
    std::size_t at = 0;
    for (std::size_t i = 0; i < r.u.size(); ++i) {
      CHECK(r.u[i] >= 0.0);
      if (r.u[i] > peak) peak = r.u[i], at = i;
    }
    const std::size_t row = at / 16, col = at % 16;
    CHECK(row > 0);
    CHECK(row < 15);
    CHECK(col > 0);
    CHECK(col < 15);
    CHECK(verify::darcy_symmetry_defect() <= 1e-9);
  }
  SUBCASE("refinement") { CHECK(verify::darcy_refinement_discrepancy() <= 1e-3); }
  SUBCASE("two-phase coefficient") {
    const Tensor hi = threshold_coefficient(Tensor({4, 4}, 1.0));
    for (double v : hi.data()) CHECK(v == 12.0);
    double frac = 0.0;
    for (std::uint64_t s = 0; s < 64; ++s) {
      const Tensor a = darcy_coefficient_sample({32, 32}, s);
      std::size_t high = 0;
      for (double v : a.data()) {
        CHECK((v == 12.0 || v == 3.0));
        high += v == 12.0;
      }
      frac += static_cast<double>(high) / a.size();
    }
    CHECK(std::abs(frac / 64 - 0.5) <= 0.1);
  }
  SUBCASE("non-positive coefficient rejected") {
    Tensor a({8, 8}, 1.0);
    a[10] = 0.0;
    CHECK_THROWS_AS(darcy_solve(a), ConfigError);
  }
}

TEST_CASE("vorticity") {
  SUBCASE("zero stays zero without forcing") {
    VorticityOptions o;
    o.forcing = Forcing::none;
    const auto r = navier_stokes_solve(Tensor({16, 16}), {0.5, 1.0}, o);
    for (double v : r.w.data()) CHECK(v == 0.0);
    CHECK(r.w.shape() == Shape{16, 16, 2});
  }
  SUBCASE("enstrophy non-increasing and single-mode decay") {
    CHECK(verify::vorticity_enstrophy_monotone());
    CHECK(verify::vorticity_mode_decay_error() <= 1e-6);
  }
  SUBCASE("kolmogorov forcing profile") {
    VorticityOptions o;
    o.forcing = Forcing::kolmogorov;
    o.domain = 2 * std::numbers::pi;
    const Tensor f = vorticity_forcing(16, o);
    const double x2 = 2 * std::numbers::pi * 3 / 16.0;
    CHECK(f.at({5, 3}) == doctest::Approx(-4.0 * std::cos(4.0 * x2)).epsilon(1e-12));
  }
}

TEST_CASE("dataset container") {
  GeneratorConfig g;
  g.family = PdeFamily::burgers;
  g.resolution = 32;
  g.count = 3;
  g.seed = 9;
  g.refine = 2;
  const PdeDataset ds = generate_dataset(g);
  const auto path = temp_path("ds.lnop");

  SUBCASE("round trip is bit-identical") {
    dataset_write(path, ds);
    const PdeDataset back = dataset_read(path);
    CHECK(back.grid == ds.grid);
    CHECK(back.generator == ds.generator);
    REQUIRE(back.samples.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(back.samples[i].input == ds.samples[i].input);
      CHECK(back.samples[i].target == ds.samples[i].target);
    }
  }
  SUBCASE("truncated payload is a format error") {
    dataset_write(path, ds);
    std::filesystem::resize_file(path, std::filesystem::file_size(path) - 5);
    CHECK_THROWS_AS(dataset_read(path), FormatError);
  }
  SUBCASE("bad magic and missing file") {
    io::write_text(path, "nope");
    CHECK_THROWS_AS(dataset_read(path), FormatError);
    CHECK_THROWS(dataset_read(temp_path("missing.lnop")));
  }
  remove_container(path);
}

TEST_CASE("downsampling") {
  Tensor f({1, 8});
  for (std::size_t i = 0; i < 8; ++i) f[i] = static_cast<double>(i);
  CHECK(downsample_field(f, {4}, GridLayout::node) == Tensor({1, 4}, {0, 2, 4, 6}));
  Tensor c({1, 9});
  for (std::size_t i = 0; i < 9; ++i) c[i] = static_cast<double>(i);
  CHECK(downsample_field(c, {3}, GridLayout::cell) == Tensor({1, 3}, {1, 4, 7}));
  CHECK_THROWS_AS(downsample_field(f, {4}, GridLayout::cell), ResolutionError);
  CHECK_THROWS_AS(downsample_field(f, {3}, GridLayout::node), ResolutionError);

  GridSpec ns{{16, 16, 5}, GridLayout::node, 1};
  CHECK(ns.at_resolution(8) == Shape{8, 8, 5});
  CHECK(ns.spatial_rank() == 2);
}

TEST_CASE("generators") {
  SUBCASE("seed regenerates identical samples at any thread count") {
    GeneratorConfig g;
    g.family = PdeFamily::darcy;
    g.resolution = 8;
    g.count = 3;
    g.seed = 4;
    g.refine = 3;
    const auto a = generate_dataset(g, 1);
    const auto b = generate_dataset(g, 3);
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(a.samples[i].input == b.samples[i].input);
      CHECK(a.samples[i].target == b.samples[i].target);
      for (double u : a.samples[i].target.data()) CHECK(u >= 0.0);
    }
    CHECK(a.grid.layout == GridLayout::cell);
    CHECK(a.generator.at("refine") == 3);
  }
  SUBCASE("advection at t = 0 copies the input") {
    GeneratorConfig g;
    g.family = PdeFamily::advection;
    g.resolution = 40;
    g.count = 4;
    g.t = 0.0;
    const auto ds = generate_dataset(g);
    for (const auto& s : ds.samples) CHECK(s.input == s.target);
  }
  SUBCASE("navier-stokes layout") {
    GeneratorConfig g;
    g.family = PdeFamily::navier_stokes;
    g.resolution = 8;
    g.count = 1;
    g.history = 2;
    g.horizon = 3;
    g.refine = 2;
    const auto ds = generate_dataset(g);
    CHECK(ds.input_shape() == Shape{2, 8, 8, 3});
    CHECK(ds.target_shape() == Shape{1, 8, 8, 3});
    CHECK(ds.grid.time_axes == 1);
  }
  SUBCASE("kolmogorov pairs") {
    GeneratorConfig g;
    g.family = PdeFamily::kolmogorov;
    g.resolution = 8;
    g.count = 3;
    g.refine = 2;
    g.burn_in = 0.5;
    g.pairs_per_trajectory = 2;
    const auto ds = generate_dataset(g);
    CHECK(ds.samples.size() == 3);
    CHECK(ds.samples[0].target == ds.samples[1].input);
  }
  SUBCASE("config round trip and strictness") {
    GeneratorConfig g;
    g.family = PdeFamily::burgers;
    g.nu = 0.01;
    const auto j = g.resolve().to_json();
    CHECK(GeneratorConfig::from_json(j).to_json() == j);
    auto bad = j;
    bad["viscosity"] = 1;
    CHECK_THROWS_AS(GeneratorConfig::from_json(bad), ConfigError);
    GeneratorConfig d;
    d.family = PdeFamily::darcy;
    d.refine = 4;
    CHECK_THROWS_AS(generate_dataset(d), ConfigError);
  }
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
}
