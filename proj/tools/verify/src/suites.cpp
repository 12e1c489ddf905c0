#include "lnop/verify/suites.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "lnop/blocks/spectral.hpp"
#include "lnop/data/grf.hpp"
#include "lnop/data/solvers.hpp"
#include "lnop/error.hpp"
#include "lnop/tensor/ops.hpp"
#include "lnop/tensor/optim.hpp"
#include "lnop/verify/oracles.hpp"

namespace lnop::verify {
namespace {

constexpr double kPi = std::numbers::pi;

SuiteResult verdict(std::string name, double worst, double tol, const std::string& what) {
  std::ostringstream os;
  os.precision(3);
  os << what << ": worst " << worst << " (tol " << tol << ")";
  return {std::move(name), worst <= tol, os.str()};
}

double rel_l2(const Tensor& a, const Tensor& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return std::sqrt(num / den);
}

Shape random_shape(std::mt19937_64& rng, std::size_t rank, std::size_t lo, std::size_t hi) {
  std::uniform_int_distribution<std::size_t> d(lo, hi);
  Shape s;
  for (std::size_t i = 0; i < rank; ++i) s.push_back(d(rng));
  return s;
}

// x . w along the last axis of a matrix, with a backward rule that is wrong
// by a factor 1.5 on the weight gradient.
Var corrupted_matmul(const Var& x, const Var& w) {
  Tensor out = contract_axis(x.value(), w.value(), 1);
  Tape* tape = common_tape({&x, &w});
  return tape->record(std::move(out), {x, w}, [x, w](const Tensor& g, GradAccess& grads) {
    if (grads.needed(0)) grads.at(0) += contract_axis(g, transpose(w.value()), 1);
    if (grads.needed(1)) grads.at(1) += scale(contract_axis(transpose(x.value()), g, 1), 1.5);
  });
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"contraction", "transforms", "dft", "gradients", "optimizer", "solvers"};
  return names;
}

SuiteResult contraction_suite(const SuiteOptions& options) {
  std::mt19937_64 rng(101);
  double worst = 0.0;
  for (unsigned n = 0; n < options.instances; ++n) {
    const std::size_t rank = 1 + n % 4;
    const Shape shape = random_shape(rng, rank, 1, 6);
    const std::size_t axis = n % rank;
    const Tensor x = random_tensor(shape, rng);
    const Tensor w = random_tensor({shape[axis], 1 + n % 5}, rng);
    worst = std::max(worst, max_abs_diff(contract_axis(x, w, axis), naive_contract(x, w, axis)));
  }
  return verdict("contraction", worst, 1e-12, "contract_axis vs index loops");
}

SuiteResult transform_suite(const SuiteOptions& options) {
  std::mt19937_64 rng(202);
  double worst = 0.0;
  for (unsigned n = 0; n < options.instances; ++n) {
    const std::size_t rank = 1 + n % 3;
    BlockShape shape;
    shape.channels = 1 + n % 3;
    shape.dims = random_shape(rng, rank, 3, 7);
    for (auto d : shape.dims) shape.modes.push_back(1 + rng() % d);
    auto params = TransformBlockParams::init(shape, rng, MixInit::random, "b.");
    Shape vshape{shape.channels};
    vshape.insert(vshape.end(), shape.dims.begin(), shape.dims.end());
    const Tensor v = random_tensor(vshape, rng);
    const auto bound = bind(std::as_const(params));

    std::vector<Tensor> fwd, inv;
    for (const auto& f : params.forward) fwd.push_back(f.value);
    for (const auto& b : params.inverse) inv.push_back(b.value);
    const Tensor z = forward_transform(Var::view(v), bound.forward).value();
    const Tensor z_ref = naive_separable(v, fwd);
    worst = std::max(worst, max_abs_diff(z, z_ref));
    const Tensor mixed = mode_mix(Var::view(z), bound.mix).value();
    worst = std::max(worst, max_abs_diff(mixed, naive_mode_mix(z, params.mix.value)));
    const Tensor back = inverse_transform(Var::view(mixed), bound.inverse).value();
    worst = std::max(worst, max_abs_diff(back, naive_separable(mixed, inv)));
    const Tensor block = block_update(Var::view(v), bound, Activation::relu).value();
    worst = std::max(worst, max_abs_diff(block, naive_block_update(v, params)));
  }
  return verdict("transforms", worst, 1e-12, "M / R / N / block vs naive loops");
}

SuiteResult dft_suite(const SuiteOptions& options) {
  std::mt19937_64 rng(303);
  double worst = 0.0;
  for (unsigned n = 0; n < options.instances; ++n) {
    const std::size_t rank = 1 + n % 3;
    const Shape dims = random_shape(rng, rank, 4, rank == 3 ? 6 : 10);
    Shape modes;
    for (auto d : dims) modes.push_back(1 + rng() % max_truncated_modes(d));
    const Tensor v = random_tensor(dims, rng);
    const auto z = dft_truncated(v, modes);
    const auto ref = naive_dft(v, modes);
    for (std::size_t i = 0; i < ref.size(); ++i) {
      worst = std::max({worst, std::abs(z.re[i] - ref[i].real()), std::abs(z.im[i] - ref[i].imag())});
    }
    const Tensor back = idft_padded(z, dims);
    worst = std::max(worst, max_abs_diff(back, naive_idft_padded(ref, modes, dims)));
  }
  // Keeping every mode reconstructs the input.
  for (const Shape& dims : {Shape{9}, Shape{8}, Shape{6, 8}, Shape{5, 4, 6}}) {
    Shape modes = dims;
    modes.back() = untruncated_modes(dims.back(), true);
    const Tensor v = random_tensor(dims, rng);
    worst = std::max(worst, max_abs_diff(idft_padded(dft_truncated(v, modes), dims), v));
  }
  return verdict("dft", worst, 1e-10, "truncated DFT and padded inverse vs O(n^2) sums");
}

SuiteResult gradient_suite(const SuiteOptions& options) {
  std::mt19937_64 rng(404);
  std::ostringstream detail;
  bool ok = true;
  for (auto arch : {Architecture::learnable, Architecture::fourier}) {
    for (std::size_t rank : {1u, 2u}) {
      ModelConfig cfg;
      cfg.arch = arch;
      cfg.width = 2;
      cfg.dims = Shape(rank, 8);
      cfg.modes = Shape(rank, 3);
      cfg.blocks = 2;
      cfg.seed = 7 + rank;
      OperatorModel model(cfg);
      Shape in{1}, out{1};
      in.insert(in.end(), cfg.dims.begin(), cfg.dims.end());
      out.insert(out.end(), cfg.dims.begin(), cfg.dims.end());
      const Tensor x = random_tensor(in, rng), y = random_tensor(out, rng);
      const auto r = check_model_gradients(model, x, y);
      ok = ok && r.passed();
      detail << to_string(arch) << "/" << rank << "d " << r.checked - r.failed << "/" << r.checked << "; ";
    }
  }
  if (options.negative_control) {
    Parameter w("control.weight", random_tensor({4, 3}, rng));
    const Tensor x = random_tensor({5, 4}, rng);
    w.zero_grad();
    {
      Tape tape;
      tape.backward(sum(corrupted_matmul(Var::view(x), tape.watch(w))));
    }
    const auto r = finite_difference_check({&w}, [&] { return sum(Var(contract_axis(x, w.value, 1))).value().item(); });
    ok = ok && r.passed();
    detail << "negative control " << r.checked - r.failed << "/" << r.checked << "; ";
  }
  return {"gradients", ok, detail.str() + "central differences h=1e-5, tol 1e-4 rel / 1e-7 abs"};
}

SuiteResult optimizer_suite(const SuiteOptions&) {
  // Minimise (theta - 3)^2 with the library and with the written-out recurrence.
  Parameter p("theta", Tensor::vector({0.5}));
  ScalarAdam ref{.lr = 0.1};
  double theta = 0.5, worst = 0.0;
  std::vector<Parameter*> params{&p};
  for (int i = 0; i < 25; ++i) {
    p.grad = Tensor::vector({2.0 * (p.value[0] - 3.0)});
    adam_step(params, AdamOptions{.lr = 0.1});
    theta = ref.step(theta, 2.0 * (theta - 3.0));
    worst = std::max(worst, std::abs(p.value[0] - theta));
  }
  return verdict("optimizer", worst, 1e-12, "Adam vs scripted recurrence");
}

double burgers_richardson_discrepancy() {
  const std::size_t m = 256;
  Tensor u0({m});
  for (std::size_t i = 0; i < m; ++i) u0[i] = std::sin(2.0 * kPi * static_cast<double>(i) / m);
  const auto coarse = burgers_solve(u0, {.nu = 0.1, .t_end = 1.0, .cfl = 0.25});
  const auto fine = burgers_solve(u0, {.nu = 0.1, .t_end = 1.0, .cfl = 0.125});
  return rel_l2(coarse.u, fine.u);
}

bool burgers_energy_monotone() {
  const Tensor u0 = grf_sample({512}, GrfSpec{2.0, 5.0 / (2.0 * kPi), 25.0 / (4.0 * kPi * kPi)}, 11);
  const auto r = burgers_solve(u0, {.nu = 1e-3, .t_end = 1.0});
  for (std::size_t i = 1; i < r.energy.size(); ++i) {
    if (r.energy[i] > r.energy[i - 1]) return false;
  }
  return true;
}

double darcy_refinement_discrepancy() {
  const std::size_t m = 33, f = 4 * m;
  const auto coarse = darcy_solve(Tensor({m, m}, 1.0));
  const auto fine = darcy_solve(Tensor({f, f}, 1.0));
  const double uc = coarse.u[(m / 2) * m + m / 2];
  const std::size_t c = f / 2;
  const double uf =
      0.25 * (fine.u[(c - 1) * f + c - 1] + fine.u[(c - 1) * f + c] + fine.u[c * f + c - 1] + fine.u[c * f + c]);
  return std::abs(uc - uf) / std::abs(uf);
}

double darcy_symmetry_defect() {
  const std::size_t m = 24;
  const auto r = darcy_solve(Tensor({m, m}, 1.0));
  double worst = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double v = r.u[i * m + j];
      for (double w : {r.u[j * m + i], r.u[(m - 1 - i) * m + j], r.u[i * m + (m - 1 - j)],
                       r.u[(m - 1 - j) * m + (m - 1 - i)]}) {
        worst = std::max(worst, std::abs(v - w));
      }
    }
  }
  return worst;
}

double vorticity_mode_decay_error() {
  const std::size_t m = 32;
  const double nu = 0.01, t = 1.0;
  Tensor w0({m, m});
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) w0[i * m + j] = std::cos(2.0 * kPi * (2.0 * i + 1.0 * j) / m);
  VorticityOptions o;
  o.nu = nu;
  o.forcing = Forcing::none;
  o.max_dt = 1e-3;
  const auto r = navier_stokes_solve(w0, {t}, o);
  const double decay = std::exp(-nu * 4.0 * kPi * kPi * 5.0 * t);
  double worst = 0.0;
  for (std::size_t q = 0; q < m * m; ++q) worst = std::max(worst, std::abs(r.w[q] - decay * w0[q]));
  return worst;
}

bool vorticity_enstrophy_monotone() {
  const Tensor w0 = grf_sample({64, 64}, GrfSpec{2.5, 7.0 / (2.0 * kPi), 5.0}, 3);
  VorticityOptions o;
  o.nu = 1e-3;
  o.forcing = Forcing::none;
  const auto r = navier_stokes_solve(w0, {2.0}, o);
  for (std::size_t i = 1; i < r.enstrophy.size(); ++i) {
    if (r.enstrophy[i] > r.enstrophy[i - 1]) return false;
  }
  return true;
}

double advection_shift_error() {
  // Shifting by t = s/m moves every sample s grid points. Square-wave edges sit off the grid so
  // rounding in x - t cannot flip them.
  const std::size_t m = 200;
  AdvectionParams p;
  p.center = 0.2513;
  p.width = 0.3;
  double worst = 0.0;
  for (std::size_t s : {0u, 37u, 100u, 200u}) {
    const auto pair = advection_solution(p, static_cast<double>(s) / m, m);
    for (std::size_t i = 0; i < m; ++i) {
      worst = std::max(worst, std::abs(pair.ut[i] - pair.u0[(i + m - s % m) % m]));
    }
  }
  return worst;
}

SuiteResult solver_suite(const SuiteOptions&) {
  std::ostringstream os;
  os.precision(3);
  const double burgers = burgers_richardson_discrepancy();
  const bool energy = burgers_energy_monotone();
  const double darcy = darcy_refinement_discrepancy();
  const double symmetry = darcy_symmetry_defect();
  const double decay = vorticity_mode_decay_error();
  const bool enstrophy = vorticity_enstrophy_monotone();
  const double shift = advection_shift_error();
  os << "burgers refine " << burgers << ", energy " << (energy ? "monotone" : "GROWS") << ", darcy refine " << darcy
     << ", darcy symmetry " << symmetry << ", vorticity mode " << decay << ", enstrophy "
     << (enstrophy ? "monotone" : "GROWS") << ", advection shift " << shift;
  const bool ok = burgers <= 1e-6 && energy && darcy <= 1e-3 && symmetry <= 1e-9 && decay <= 1e-6 && enstrophy &&
                  shift <= 1e-12;
  return {"solvers", ok, os.str()};
}

SuiteResult run_suite(const std::string& name, const SuiteOptions& options) {
  try {
    if (name == "contraction") return contraction_suite(options);
    if (name == "transforms") return transform_suite(options);
    if (name == "dft") return dft_suite(options);
    if (name == "gradients") return gradient_suite(options);
    if (name == "optimizer") return optimizer_suite(options);
    if (name == "solvers") return solver_suite(options);
  } catch (const Error& e) {
    return {name, false, std::string("error: ") + e.what()};
  }
  throw ConfigError("unknown verify suite '" + name + "'");
}

std::vector<SuiteResult> run_all(const SuiteOptions& options) {
  std::vector<SuiteResult> out;
  for (const auto& n : suite_names()) out.push_back(run_suite(n, options));
  return out;
}

}  // namespace lnop::verify
