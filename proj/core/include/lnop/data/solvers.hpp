#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "lnop/tensor/tensor.hpp"

namespace lnop {

// ---- Burgers: u_t + (u^2/2)_x = nu u_xx on the unit periodic interval ----

struct BurgersOptions {
  double nu = 1e-3;
  double t_end = 1.0;
  double cfl = 0.25;
  /// Upper bound on the step when velocities are tiny.
  double max_dt = 1e-2;
  /// Steps below this are treated as a CFL collapse.
  double min_dt = 1e-10;
};

struct BurgersResult {
  Tensor u;
  /// Mean of u^2 over the grid at t=0 and after every step.
  std::vector<double> energy;
  std::size_t steps = 0;
};

/// Pseudo-spectral solve on the grid of u0: 2/3-rule dealiased nonlinear
/// term, exact integrating factor for diffusion, classical RK4 in time with
/// dt = cfl * dx / max|u| (capped) and a final step landing on t_end.
BurgersResult burgers_solve(const Tensor& u0, const BurgersOptions& opts);

// ---- Advection: exact shift of a square wave plus a semicircular bump ----

struct AdvectionParams {
  double center = 0.5;  ///< c
  double width = 0.3;   ///< omega, in (0, 1)
  double height = 1.0;  ///< h
  /// Bump scale a; defaults to 2h/omega so the bump spans the square wave.
  std::optional<double> bump_scale;

  void validate() const;
  double scale() const { return bump_scale.value_or(2.0 * height / width); }
};

/// u0 evaluated at x (periodic, unit domain).
double advection_initial(const AdvectionParams& p, double x);

struct AdvectionPair {
  Tensor u0;
  Tensor ut;
};

/// Grid x_i = i/m; ut[i] = u0(x_i - t) with periodic wrap.
AdvectionPair advection_solution(const AdvectionParams& p, double t, std::size_t m);

// ---- Darcy: -div(a grad u) = f on the unit square, u = 0 on the boundary ----

struct DarcyOptions {
  double forcing = 1.0;
  double rel_tol = 1e-10;
  /// 0 means 10 m^2.
  std::size_t max_iterations = 0;
};

struct DarcyResult {
  Tensor u;
  std::size_t iterations = 0;
  double relative_residual = 0.0;
};

/// Cell-centred 5-point finite volumes on an m x m grid (cell centres at
/// (i + 1/2)/m). Interior faces use the harmonic mean of the two cell
/// coefficients; boundary faces see the wall at half a cell. Solved by
/// conjugate gradients.
DarcyResult darcy_solve(const Tensor& a, const DarcyOptions& opts = {});

/// Two-phase coefficient from a field: 12 where field > 0, 3 elsewhere.
Tensor threshold_coefficient(const Tensor& field, double high = 12.0, double low = 3.0);

/// Coefficient sampled from a GRF (alpha 2, tau 3) thresholded at 0.
Tensor darcy_coefficient_sample(const Shape& extents, std::uint64_t seed);

// ---- 2-D incompressible Navier-Stokes in vorticity form ----

enum class Forcing { none, ns, kolmogorov };

struct VorticityOptions {
  double nu = 1e-3;
  Forcing forcing = Forcing::ns;
  /// Kolmogorov wavenumber n.
  int kolmogorov_n = 4;
  /// Side of the periodic square: 1 for ns, 2 pi for kolmogorov.
  double domain = 1.0;
  double cfl = 0.25;
  double max_dt = 1e-2;
  double min_dt = 1e-10;
  /// max|w| may grow at most this factor over max(1, max|w0|).
  double blowup_factor = 1e6;
};

struct VorticityResult {
  /// (m, m, times.size())
  Tensor w;
  /// sum of w^2 / m^2 at t=0 and after every step.
  std::vector<double> enstrophy;
  std::size_t steps = 0;
};

/// Pseudo-spectral vorticity solver: psi = -Lap^{-1} w, u = (psi_y, -psi_x),
/// 2/3-rule dealiasing, Crank-Nicolson diffusion, Heun advection with a CFL
/// step. Axis 0 of w is x1, axis 1 is x2. Records w at each requested time
/// (ascending, >= 0).
VorticityResult navier_stokes_solve(const Tensor& w0, const std::vector<double>& times,
                                    const VorticityOptions& opts);

/// Curl of the body force on the m x m grid of the configured domain.
Tensor vorticity_forcing(std::size_t m, const VorticityOptions& opts);

}  // namespace lnop
