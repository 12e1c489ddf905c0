#include "lnop/data/generators.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <random>
#include <thread>

#include "lnop/data/grf.hpp"
#include "lnop/data/solvers.hpp"
#include "lnop/error.hpp"

namespace lnop {
namespace {

constexpr double kPi = std::numbers::pi;

// Input fields follow the usual benchmark covariances, rewritten in terms of
// integer frequencies on the unit domain.
const GrfSpec kBurgersInit{2.0, 5.0 / (2.0 * kPi), 25.0 / (4.0 * kPi * kPi)};
const GrfSpec kVorticityInit{2.5, 7.0 / (2.0 * kPi), std::pow(7.0, 1.5) * std::pow(4.0 * kPi * kPi, -1.25)};
// Kolmogorov runs on (0, 2 pi)^2, where integer frequencies are wavenumbers.
const GrfSpec kKolmogorovInit{2.5, 7.0, std::pow(7.0, 1.5)};

void check_energy_decay(const std::vector<double>& energy, std::size_t sample) {
  for (std::size_t i = 1; i < energy.size(); ++i) {
    if (energy[i] > energy[i - 1] * (1.0 + 1e-12)) {
      throw SolverError("sample " + std::to_string(sample) + ": Burgers energy increased at step " +
                        std::to_string(i) + " (" + std::to_string(energy[i - 1]) + " -> " +
                        std::to_string(energy[i]) + ")");
    }
  }
}

void check_darcy(const Tensor& u, std::size_t sample) {
  const std::size_t m = u.shape()[0];
  double mx = 0.0, mn = 0.0, boundary_max = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double v = u[i * m + j];
      mx = std::max(mx, v);
      mn = std::min(mn, v);
      if (i == 0 || j == 0 || i + 1 == m || j + 1 == m) boundary_max = std::max(boundary_max, v);
    }
  }
  if (mn < -1e-12 * std::max(mx, 1.0)) {
    throw SolverError("sample " + std::to_string(sample) + ": Darcy solution violates u >= 0 (min " +
                      std::to_string(mn) + ")");
  }
  if (m > 2 && !(mx > boundary_max)) {
    throw SolverError("sample " + std::to_string(sample) + ": Darcy maximum is not attained in the interior");
  }
}

Tensor as_channel(const Tensor& field) {
  Shape s{1};
  s.insert(s.end(), field.shape().begin(), field.shape().end());
  return field.reshaped(std::move(s));
}

struct Generator {
  GeneratorConfig cfg;
  GridSpec grid;
  std::size_t in_channels = 1;
  std::size_t out_channels = 1;
  std::size_t fine = 0;

  explicit Generator(const GeneratorConfig& c) : cfg(c), fine(c.resolution * *c.refine) {
    const std::size_t r = c.resolution;
    switch (c.family) {
      case PdeFamily::burgers:
      case PdeFamily::advection:
        grid = {{r}, GridLayout::node};
        break;
      case PdeFamily::darcy:
        grid = {{r, r}, GridLayout::cell};
        break;
      case PdeFamily::navier_stokes:
        grid = {{r, r, c.horizon}, GridLayout::node, 1};
        in_channels = c.history;
        break;
      case PdeFamily::kolmogorov:
        grid = {{r, r}, GridLayout::node};
        break;
    }
  }

  // Spatial subsampling of a fine field (no channel axis) to the target grid.
  Tensor coarse(const Tensor& field, GridLayout layout) const {
    Shape ext(field.shape().size(), cfg.resolution);
    return downsample_field(as_channel(field), ext, layout);
  }

  PdeSample burgers(std::size_t index) const {
    const Tensor u0 = grf_sample({fine}, kBurgersInit, derive_seed(cfg.seed, index));
    const auto res = burgers_solve(u0, BurgersOptions{.nu = *cfg.nu, .t_end = *cfg.t});
    check_energy_decay(res.energy, index);
    return {coarse(u0, GridLayout::node), coarse(res.u, GridLayout::node)};
  }

  PdeSample advection(std::size_t index) const {
    std::mt19937_64 rng(derive_seed(cfg.seed, index));
    auto draw = [&rng](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
    AdvectionParams p;
    p.center = draw(cfg.center_min, cfg.center_max);
    p.width = draw(cfg.width_min, cfg.width_max);
    p.height = draw(cfg.height_min, cfg.height_max);
    const auto pair = advection_solution(p, *cfg.t, cfg.resolution);
    return {as_channel(pair.u0), as_channel(pair.ut)};
  }

  PdeSample darcy(std::size_t index) const {
    const Tensor a = darcy_coefficient_sample({fine, fine}, derive_seed(cfg.seed, index));
    const auto res = darcy_solve(a);
    check_darcy(res.u, index);
    return {coarse(a, GridLayout::cell), coarse(res.u, GridLayout::cell)};
  }

  PdeSample navier_stokes(std::size_t index) const {
    const Tensor w0 = grf_sample({fine, fine}, kVorticityInit, derive_seed(cfg.seed, index));
    std::vector<double> times;
    for (std::size_t k = 0; k < cfg.history + cfg.horizon; ++k) times.push_back(static_cast<double>(k) * *cfg.dt);
    VorticityOptions o{.nu = *cfg.nu, .forcing = Forcing::ns, .domain = 1.0};
    const auto res = navier_stokes_solve(w0, times, o);
    const std::size_t r = cfg.resolution, s = *cfg.refine, nt = times.size();
    PdeSample out{Tensor({cfg.history, r, r, cfg.horizon}), Tensor({1, r, r, cfg.horizon})};
    for (std::size_t i = 0; i < r; ++i) {
      for (std::size_t j = 0; j < r; ++j) {
        const std::size_t src = ((i * s) * fine + j * s) * nt;
        for (std::size_t h = 0; h < cfg.history; ++h) {
          for (std::size_t k = 0; k < cfg.horizon; ++k) {
            out.input[((h * r + i) * r + j) * cfg.horizon + k] = res.w[src + h];
          }
        }
        for (std::size_t k = 0; k < cfg.horizon; ++k) {
          out.target[(i * r + j) * cfg.horizon + k] = res.w[src + cfg.history + k];
        }
      }
    }
    return out;
  }

  // One trajectory yields pairs_per_trajectory consecutive (w(t), w(t + dt)) samples.
  std::vector<PdeSample> kolmogorov_trajectory(std::size_t trajectory) const {
    const Tensor w0 = grf_sample({fine, fine}, kKolmogorovInit, derive_seed(cfg.seed, trajectory));
    std::vector<double> times;
    for (std::size_t k = 0; k <= cfg.pairs_per_trajectory; ++k) {
      times.push_back(cfg.burn_in + static_cast<double>(k) * *cfg.dt);
    }
    VorticityOptions o{.nu = *cfg.nu,
                       .forcing = Forcing::kolmogorov,
                       .kolmogorov_n = cfg.kolmogorov_n,
                       .domain = 2.0 * kPi};
    const auto res = navier_stokes_solve(w0, times, o);
    const std::size_t nt = times.size();
    std::vector<Tensor> snaps;
    for (std::size_t k = 0; k < nt; ++k) {
      Tensor f({fine, fine});
      for (std::size_t q = 0; q < fine * fine; ++q) f[q] = res.w[q * nt + k];
      snaps.push_back(coarse(f, GridLayout::node));
    }
    std::vector<PdeSample> out;
    for (std::size_t k = 0; k + 1 < nt; ++k) out.push_back({snaps[k], snaps[k + 1]});
    return out;
  }
};

template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn fn) {
  const unsigned workers = static_cast<unsigned>(std::max<std::size_t>(1, std::min<std::size_t>(threads, n)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::jthread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next = n;
        }
      }
    });
  }
  pool.clear();
  if (error) std::rethrow_exception(error);
}

}  // namespace

std::string to_string(PdeFamily family) {
  switch (family) {
    case PdeFamily::burgers: return "burgers";
    case PdeFamily::advection: return "advection";
    case PdeFamily::darcy: return "darcy";
    case PdeFamily::navier_stokes: return "navier_stokes";
    case PdeFamily::kolmogorov: return "kolmogorov";
  }
  return "?";
}

PdeFamily parse_pde_family(const std::string& name) {
  for (auto f : {PdeFamily::burgers, PdeFamily::advection, PdeFamily::darcy, PdeFamily::navier_stokes,
                 PdeFamily::kolmogorov}) {
    if (to_string(f) == name) return f;
  }
  if (name == "ns") return PdeFamily::navier_stokes;
  throw ConfigError("unknown PDE family '" + name + "' (expected burgers|advection|darcy|navier_stokes|kolmogorov)");
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  // splitmix64 over the pair
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

GeneratorConfig GeneratorConfig::resolve() const {
  GeneratorConfig c = *this;
  switch (family) {
    case PdeFamily::burgers:
      if (!c.refine) c.refine = 4;
      if (!c.nu) c.nu = 1e-3;
      if (!c.t) c.t = 1.0;
      break;
    case PdeFamily::advection:
      if (!c.refine) c.refine = 1;
      if (!c.t) c.t = 0.5;
      break;
    case PdeFamily::darcy:
      if (!c.refine) c.refine = 5;
      break;
    case PdeFamily::navier_stokes:
      if (!c.refine) c.refine = 4;
      if (!c.nu) c.nu = 1e-3;
      if (!c.dt) c.dt = 1.0;
      break;
    case PdeFamily::kolmogorov:
      if (!c.refine) c.refine = 4;
      if (!c.nu) c.nu = 1.0 / reynolds;
      if (!c.dt) c.dt = 0.5;
      break;
  }
  return c;
}

void GeneratorConfig::validate() const {
  if (resolution < 4) throw ConfigError("gen: resolution must be >= 4");
  if (count == 0) throw ConfigError("gen: count must be >= 1");
  if (refine && *refine == 0) throw ConfigError("gen: refine must be >= 1");
  if (family == PdeFamily::darcy && refine && *refine % 2 == 0) {
    throw ConfigError("gen: darcy refine factor must be odd so coarse cells share centres with fine cells");
  }
  if (nu && !(*nu > 0.0)) throw ConfigError("gen: nu must be > 0");
  if (dt && !(*dt > 0.0)) throw ConfigError("gen: dt must be > 0");
  if (t && !(*t >= 0.0)) throw ConfigError("gen: t must be >= 0");
  if (family == PdeFamily::navier_stokes && (history == 0 || horizon == 0)) {
    throw ConfigError("gen: history and horizon must be >= 1");
  }
  if (family == PdeFamily::kolmogorov && (pairs_per_trajectory == 0 || !(reynolds > 0.0) || kolmogorov_n <= 0)) {
    throw ConfigError("gen: kolmogorov needs pairs_per_trajectory >= 1, reynolds > 0, n >= 1");
  }
  if (family == PdeFamily::advection) {
    if (!(0.0 < width_min && width_min <= width_max && width_max < 1.0)) {
      throw ConfigError("gen: advection widths must satisfy 0 < width_min <= width_max < 1");
    }
    if (center_min > center_max || height_min > height_max) throw ConfigError("gen: advection ranges inverted");
  }
}

nlohmann::json GeneratorConfig::to_json() const {
  nlohmann::json j{{"family", to_string(family)},
                   {"resolution", resolution},
                   {"count", count},
                   {"seed", seed}};
  if (refine) j["refine"] = *refine;
  if (nu) j["nu"] = *nu;
  if (t) j["t"] = *t;
  if (dt) j["dt"] = *dt;
  switch (family) {
    case PdeFamily::navier_stokes:
      j["history"] = history;
      j["horizon"] = horizon;
      break;
    case PdeFamily::kolmogorov:
      j["reynolds"] = reynolds;
      j["kolmogorov_n"] = kolmogorov_n;
      j["burn_in"] = burn_in;
      j["pairs_per_trajectory"] = pairs_per_trajectory;
      break;
    case PdeFamily::advection:
      j["center"] = {center_min, center_max};
      j["width"] = {width_min, width_max};
      j["height"] = {height_min, height_max};
      break;
    default:
      break;
  }
  return j;
}

GeneratorConfig GeneratorConfig::from_json(const nlohmann::json& j) {
  GeneratorConfig c;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "family") c.family = parse_pde_family(value.get<std::string>());
      else if (key == "resolution") c.resolution = value.get<std::size_t>();
      else if (key == "count") c.count = value.get<std::size_t>();
      else if (key == "seed") c.seed = value.get<std::uint64_t>();
      else if (key == "refine") c.refine = value.get<std::size_t>();
      else if (key == "nu") c.nu = value.get<double>();
      else if (key == "t") c.t = value.get<double>();
      else if (key == "dt") c.dt = value.get<double>();
      else if (key == "history") c.history = value.get<std::size_t>();
      else if (key == "horizon") c.horizon = value.get<std::size_t>();
      else if (key == "reynolds") c.reynolds = value.get<double>();
      else if (key == "kolmogorov_n") c.kolmogorov_n = value.get<int>();
      else if (key == "burn_in") c.burn_in = value.get<double>();
      else if (key == "pairs_per_trajectory") c.pairs_per_trajectory = value.get<std::size_t>();
      else if (key == "center") std::tie(c.center_min, c.center_max) = value.get<std::pair<double, double>>();
      else if (key == "width") std::tie(c.width_min, c.width_max) = value.get<std::pair<double, double>>();
      else if (key == "height") std::tie(c.height_min, c.height_max) = value.get<std::pair<double, double>>();
      else throw ConfigError("unknown generator key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("generator config: ") + e.what());
  }
  return c;
}

PdeDataset generate_dataset(const GeneratorConfig& config, unsigned threads) {
  config.validate();
  const GeneratorConfig cfg = config.resolve();
  const Generator gen(cfg);
  PdeDataset ds;
  ds.name = to_string(cfg.family);
  ds.grid = gen.grid;
  ds.in_channels = gen.in_channels;
  ds.out_channels = gen.out_channels;
  ds.generator = cfg.to_json();
  ds.samples.resize(cfg.count);

  if (cfg.family == PdeFamily::kolmogorov) {
    const std::size_t per = cfg.pairs_per_trajectory;
    const std::size_t trajectories = (cfg.count + per - 1) / per;
    parallel_for(trajectories, threads, [&](std::size_t tr) {
      auto pairs = gen.kolmogorov_trajectory(tr);
      for (std::size_t k = 0; k < pairs.size() && tr * per + k < cfg.count; ++k) {
        ds.samples[tr * per + k] = std::move(pairs[k]);
      }
    });
  } else {
    parallel_for(cfg.count, threads, [&](std::size_t i) {
      switch (cfg.family) {
        case PdeFamily::burgers: ds.samples[i] = gen.burgers(i); break;
        case PdeFamily::advection: ds.samples[i] = gen.advection(i); break;
        case PdeFamily::darcy: ds.samples[i] = gen.darcy(i); break;
        case PdeFamily::navier_stokes: ds.samples[i] = gen.navier_stokes(i); break;
        case PdeFamily::kolmogorov: break;
      }
    });
  }
  ds.validate();
  return ds;
}

}  // namespace lnop
