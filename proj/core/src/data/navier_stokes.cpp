#include <algorithm>
#include <cmath>
#include <numbers>

#include "lnop/data/fft.hpp"
#include "lnop/data/solvers.hpp"
#include "lnop/error.hpp"

namespace lnop {
namespace {

using fft::Complex;

class VorticityStepper {
 public:
  VorticityStepper(std::size_t m, const VorticityOptions& opts)
      : opts_(opts), m_(m), half_(m / 2 + 1), fft_({m, m}), n_(m * half_) {
    const double base = 2.0 * std::numbers::pi / opts.domain;
    kx_.resize(n_);
    ky_.resize(n_);
    lap_.resize(n_);
    keep_.resize(n_);
    for (std::size_t i = 0; i < m; ++i) {
      const long fi = fft::signed_frequency(i, m);
      for (std::size_t j = 0; j < half_; ++j) {
        const std::size_t p = i * half_ + j;
        kx_[p] = base * static_cast<double>(fi);
        ky_[p] = base * static_cast<double>(j);
        lap_[p] = kx_[p] * kx_[p] + ky_[p] * ky_[p];
        keep_[p] = 3 * static_cast<std::size_t>(std::labs(fi)) < m && 3 * j < m;
      }
    }
    for (auto* buf : {&u1_, &u2_, &wx_, &wy_, &phys_}) buf->resize(m * m);
    spec_.resize(n_);
    force_.assign(n_, Complex{});
    if (opts.forcing != Forcing::none) {
      const Tensor f = vorticity_forcing(m, opts);
      fft_.forward(f.data(), force_);
    }
  }

  std::size_t spectrum_size() const { return n_; }

  void forward(std::span<const double> w, std::vector<Complex>& wh) { fft_.forward(w, wh); }
  void inverse(const std::vector<Complex>& wh, std::span<double> w) { fft_.inverse(wh, w); }

  // Advection term u.grad(w), dealiased; also reports max |u|.
  double advection(const std::vector<Complex>& wh, std::vector<Complex>& out) {
    auto to_phys = [&](auto coef, std::vector<double>& dst) {
      for (std::size_t p = 0; p < n_; ++p) spec_[p] = keep_[p] ? coef(p) : Complex{};
      fft_.inverse(spec_, dst);
    };
    const Complex i1(0.0, 1.0);
    auto psi = [&](std::size_t p) { return lap_[p] > 0.0 ? wh[p] / lap_[p] : Complex{}; };
    to_phys([&](std::size_t p) { return i1 * ky_[p] * psi(p); }, u1_);
    to_phys([&](std::size_t p) { return -i1 * kx_[p] * psi(p); }, u2_);
    to_phys([&](std::size_t p) { return i1 * kx_[p] * wh[p]; }, wx_);
    to_phys([&](std::size_t p) { return i1 * ky_[p] * wh[p]; }, wy_);
    double umax = 0.0;
    for (std::size_t q = 0; q < phys_.size(); ++q) {
      phys_[q] = u1_[q] * wx_[q] + u2_[q] * wy_[q];
      umax = std::max({umax, std::abs(u1_[q]), std::abs(u2_[q])});
    }
    fft_.forward(phys_, out);
    for (std::size_t p = 0; p < n_; ++p) {
      if (!keep_[p]) out[p] = Complex{};
    }
    return umax;
  }

  // Crank-Nicolson diffusion around a Heun (predictor-corrector) advection step.
  void step(std::vector<Complex>& wh, const std::vector<Complex>& adv0, double dt) {
    pred_.resize(n_);
    adv1_.resize(n_);
    for (std::size_t p = 0; p < n_; ++p) {
      const double a = 0.5 * dt * opts_.nu * lap_[p];
      pred_[p] = ((1.0 - a) * wh[p] + dt * (force_[p] - adv0[p])) / (1.0 + a);
    }
    advection(pred_, adv1_);
    for (std::size_t p = 0; p < n_; ++p) {
      const double a = 0.5 * dt * opts_.nu * lap_[p];
      wh[p] = ((1.0 - a) * wh[p] + 0.5 * dt * (2.0 * force_[p] - adv0[p] - adv1_[p])) / (1.0 + a);
    }
  }

  double mean_square(const std::vector<Complex>& wh) const {
    double s = 0.0;
    for (std::size_t p = 0; p < n_; ++p) {
      const std::size_t j = p % half_;
      const bool paired = j != 0 && 2 * j != m_;
      s += (paired ? 2.0 : 1.0) * std::norm(wh[p]);
    }
    const double mm = static_cast<double>(m_ * m_);
    return s / (mm * mm);
  }

  double max_abs(const std::vector<Complex>& wh) {
    fft_.inverse(wh, phys_);
    double mx = 0.0;
    for (double v : phys_) mx = std::max(mx, std::abs(v));
    return mx;
  }

 private:
  VorticityOptions opts_;
  std::size_t m_, half_;
  fft::RealTransform fft_;
  std::size_t n_;
  std::vector<double> kx_, ky_, lap_;
  std::vector<bool> keep_;
  std::vector<double> u1_, u2_, wx_, wy_, phys_;
  std::vector<Complex> spec_, force_, pred_, adv1_;
};

}  // namespace

Tensor vorticity_forcing(std::size_t m, const VorticityOptions& opts) {
  Tensor f({m, m});
  const double h = opts.domain / static_cast<double>(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double x1 = static_cast<double>(i) * h, x2 = static_cast<double>(j) * h;
      double v = 0.0;
      if (opts.forcing == Forcing::ns) {
        const double s = 2.0 * std::numbers::pi * (x1 + x2);
        v = 0.1 * (std::sin(s) + std::cos(s));
      } else if (opts.forcing == Forcing::kolmogorov) {
        // curl of sin(n x2) e1
        const double n = static_cast<double>(opts.kolmogorov_n);
        v = -n * std::cos(n * x2);
      }
      f[i * m + j] = v;
    }
  }
  return f;
}

VorticityResult navier_stokes_solve(const Tensor& w0, const std::vector<double>& times,
                                    const VorticityOptions& opts) {
  if (w0.shape().size() != 2 || w0.shape()[0] != w0.shape()[1] || w0.shape()[0] < 4) {
    throw DimensionError("navier_stokes_solve expects a square m x m field (m >= 4), got " + to_string(w0.shape()));
  }
  if (!(opts.nu > 0.0)) throw ConfigError("viscosity must be > 0");
  if (!(opts.domain > 0.0)) throw ConfigError("domain length must be > 0");
  if (!(opts.cfl > 0.0)) throw ConfigError("CFL number must be > 0");
  if (!w0.all_finite()) throw NumericalError("navier_stokes_solve: non-finite initial vorticity");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] >= 0.0) || (i > 0 && times[i] < times[i - 1])) {
      throw ConfigError("record times must be ascending and >= 0");
    }
  }
  const std::size_t m = w0.shape()[0];
  const double dx = opts.domain / static_cast<double>(m);
  VorticityStepper stepper(m, opts);
  std::vector<Complex> wh(stepper.spectrum_size()), adv(stepper.spectrum_size());
  stepper.forward(w0.data(), wh);

  double w0_max = 0.0;
  for (double v : w0.data()) w0_max = std::max(w0_max, std::abs(v));
  const double limit = opts.blowup_factor * std::max(1.0, w0_max);

  VorticityResult result;
  result.w = Tensor({m, m, times.size()});
  result.enstrophy.push_back(stepper.mean_square(wh));
  std::vector<double> snapshot(m * m);
  double t = 0.0;
  for (std::size_t r = 0; r < times.size(); ++r) {
    while (t < times[r]) {
      const double umax = stepper.advection(wh, adv);
      double dt = umax > 0.0 ? opts.cfl * dx / umax : opts.max_dt;
      dt = std::min({dt, opts.max_dt, times[r] - t});
      const bool last = dt >= times[r] - t;
      if (!last && dt < opts.min_dt) {
        throw SolverError("vorticity CFL step collapsed to " + std::to_string(dt) + " at t=" + std::to_string(t));
      }
      stepper.step(wh, adv, dt);
      t = last ? times[r] : t + dt;
      ++result.steps;
      const double ens = stepper.mean_square(wh);
      if (!std::isfinite(ens)) throw SolverError("vorticity became non-finite at t=" + std::to_string(t));
      result.enstrophy.push_back(ens);
      if (result.steps % 16 == 0 && stepper.max_abs(wh) > limit) {
        throw SolverError("vorticity blow-up: max|w| exceeded " + std::to_string(limit) + " at t=" + std::to_string(t));
      }
    }
    stepper.inverse(wh, snapshot);
    double mx = 0.0;
    for (std::size_t q = 0; q < m * m; ++q) {
      result.w[q * times.size() + r] = snapshot[q];
      mx = std::max(mx, std::abs(snapshot[q]));
    }
    if (mx > limit) throw SolverError("vorticity blow-up: max|w| exceeded " + std::to_string(limit));
  }
  return result;
}

}  // namespace lnop
