#include <algorithm>
#include <cmath>
#include <numbers>

#include "lnop/data/fft.hpp"
#include "lnop/data/solvers.hpp"
#include "lnop/error.hpp"

namespace lnop {
namespace {

using fft::Complex;

class BurgersRhs {
 public:
  explicit BurgersRhs(std::size_t m) : fft_({m}), m_(m), u_(m), spec_(m / 2 + 1) {
    wave_.resize(spec_.size());
    keep_.resize(spec_.size());
    for (std::size_t f = 0; f < spec_.size(); ++f) {
      wave_[f] = 2.0 * std::numbers::pi * static_cast<double>(f);
      keep_[f] = 3 * f < m;
    }
  }

  double wave(std::size_t f) const { return wave_[f]; }
  std::size_t spectrum_size() const { return spec_.size(); }

  // -d/dx (u^2 / 2) on the dealiased field, dealiased again.
  void eval(const std::vector<Complex>& uh, std::vector<Complex>& out) {
    for (std::size_t f = 0; f < spec_.size(); ++f) spec_[f] = keep_[f] ? uh[f] : Complex{};
    fft_.inverse(spec_, u_);
    for (auto& v : u_) v = 0.5 * v * v;
    fft_.forward(u_, out);
    for (std::size_t f = 0; f < out.size(); ++f) out[f] = keep_[f] ? Complex(0.0, -wave_[f]) * out[f] : Complex{};
  }

  double max_abs(const std::vector<Complex>& uh) {
    fft_.inverse(uh, u_);
    double mx = 0.0;
    for (double v : u_) mx = std::max(mx, std::abs(v));
    return mx;
  }

  void to_physical(const std::vector<Complex>& uh, Tensor& out) { fft_.inverse(uh, out.data()); }

  double mean_square(const std::vector<Complex>& uh) const {
    double s = 0.0;
    for (std::size_t f = 0; f < uh.size(); ++f) {
      const bool paired = f != 0 && 2 * f != m_;
      s += (paired ? 2.0 : 1.0) * std::norm(uh[f]);
    }
    return s / static_cast<double>(m_ * m_);
  }

 private:
  fft::RealTransform fft_;
  std::size_t m_;
  std::vector<double> u_;
  std::vector<Complex> spec_;
  std::vector<double> wave_;
  std::vector<bool> keep_;
};

}  // namespace

BurgersResult burgers_solve(const Tensor& u0, const BurgersOptions& opts) {
  if (u0.shape().size() != 1 || u0.size() < 4) throw DimensionError("burgers_solve expects a 1-D field of length >= 4");
  if (!(opts.nu > 0.0)) throw ConfigError("Burgers viscosity must be > 0");
  if (!(opts.t_end >= 0.0)) throw ConfigError("Burgers t_end must be >= 0");
  if (!(opts.cfl > 0.0)) throw ConfigError("Burgers CFL number must be > 0");
  if (!u0.all_finite()) throw NumericalError("burgers_solve: non-finite initial condition");

  const std::size_t m = u0.size();
  const double dx = 1.0 / static_cast<double>(m);
  BurgersRhs rhs(m);
  fft::RealTransform fft({m});
  const std::size_t ns = rhs.spectrum_size();
  std::vector<Complex> uh(ns), k1(ns), k2(ns), k3(ns), k4(ns), tmp(ns);
  fft.forward(u0.data(), uh);

  BurgersResult result;
  result.energy.push_back(rhs.mean_square(uh));
  std::vector<double> e_half(ns), e_full(ns);
  double t = 0.0;
  while (t < opts.t_end) {
    const double umax = rhs.max_abs(uh);
    double dt = umax > 0.0 ? opts.cfl * dx / umax : opts.max_dt;
    dt = std::min({dt, opts.max_dt, opts.t_end - t});
    const bool last = dt >= opts.t_end - t;
    if (!last && dt < opts.min_dt) {
      throw SolverError("Burgers CFL step collapsed to " + std::to_string(dt) + " at t=" + std::to_string(t));
    }
    for (std::size_t f = 0; f < ns; ++f) {
      const double k = rhs.wave(f);
      e_half[f] = std::exp(-opts.nu * k * k * dt / 2.0);
      e_full[f] = e_half[f] * e_half[f];
    }
    rhs.eval(uh, k1);
    for (std::size_t f = 0; f < ns; ++f) tmp[f] = e_half[f] * (uh[f] + 0.5 * dt * k1[f]);
    rhs.eval(tmp, k2);
    for (std::size_t f = 0; f < ns; ++f) tmp[f] = e_half[f] * uh[f] + 0.5 * dt * k2[f];
    rhs.eval(tmp, k3);
    for (std::size_t f = 0; f < ns; ++f) tmp[f] = e_full[f] * uh[f] + dt * e_half[f] * k3[f];
    rhs.eval(tmp, k4);
    for (std::size_t f = 0; f < ns; ++f) {
      uh[f] = e_full[f] * uh[f] +
              dt / 6.0 * (e_full[f] * k1[f] + 2.0 * e_half[f] * (k2[f] + k3[f]) + k4[f]);
    }
    t = last ? opts.t_end : t + dt;
    ++result.steps;
    const double energy = rhs.mean_square(uh);
    if (!std::isfinite(energy)) throw SolverError("Burgers solution became non-finite at t=" + std::to_string(t));
    result.energy.push_back(energy);
  }
  result.u = Tensor({m});
  rhs.to_physical(uh, result.u);
  return result;
}

}  // namespace lnop
