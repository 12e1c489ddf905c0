#include <cmath>
#include <numbers>

#include "lnop/data/grf.hpp"
#include "lnop/data/solvers.hpp"
#include "lnop/error.hpp"

namespace lnop {
namespace {

// Stencil coefficients of the SPD operator A: (Au)_p = diag_p u_p - sum_faces c u_nb.
struct Stencil {
  std::size_t m = 0;
  std::vector<double> east;   // face between (i, j) and (i + 1, j)
  std::vector<double> north;  // face between (i, j) and (i, j + 1)
  std::vector<double> diag;

  void apply(const std::vector<double>& u, std::vector<double>& out) const {
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        const std::size_t p = i * m + j;
        double v = diag[p] * u[p];
        if (i + 1 < m) v -= east[p] * u[p + m];
        if (i > 0) v -= east[p - m] * u[p - m];
        if (j + 1 < m) v -= north[p] * u[p + 1];
        if (j > 0) v -= north[p - 1] * u[p - 1];
        out[p] = v;
      }
    }
  }
};

Stencil build_stencil(const Tensor& a) {
  const std::size_t m = a.shape()[0];
  const double inv_h2 = static_cast<double>(m * m);
  Stencil s;
  s.m = m;
  s.east.assign(m * m, 0.0);
  s.north.assign(m * m, 0.0);
  s.diag.assign(m * m, 0.0);
  auto harmonic = [](double x, double y) { return 2.0 * x * y / (x + y); };
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const std::size_t p = i * m + j;
      if (i + 1 < m) {
        const double c = harmonic(a[p], a[p + m]) * inv_h2;
        s.east[p] = c;
        s.diag[p] += c;
        s.diag[p + m] += c;
      }
      if (j + 1 < m) {
        const double c = harmonic(a[p], a[p + 1]) * inv_h2;
        s.north[p] = c;
        s.diag[p] += c;
        s.diag[p + 1] += c;
      }
      // Dirichlet wall half a cell away.
      const std::size_t walls = (i == 0) + (i + 1 == m) + (j == 0) + (j + 1 == m);
      s.diag[p] += static_cast<double>(walls) * 2.0 * a[p] * inv_h2;
    }
  }
  return s;
}

double dot(const std::vector<double>& x, const std::vector<double>& y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

}  // namespace

DarcyResult darcy_solve(const Tensor& a, const DarcyOptions& opts) {
  if (a.shape().size() != 2 || a.shape()[0] != a.shape()[1] || a.shape()[0] == 0) {
    throw DimensionError("darcy_solve expects a square m x m coefficient, got " + to_string(a.shape()));
  }
  for (double v : a.data()) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("Darcy coefficient must be finite and > 0 everywhere");
  }
  const std::size_t m = a.shape()[0];
  const std::size_t n = m * m;
  const std::size_t max_iter = opts.max_iterations ? opts.max_iterations : 10 * n;
  const Stencil s = build_stencil(a);

  std::vector<double> u(n, 0.0), r(n, opts.forcing), p(r), ap(n);
  const double b_norm = std::sqrt(dot(r, r));
  DarcyResult result;
  if (b_norm == 0.0) {
    result.u = Tensor({m, m});
    return result;
  }
  double rr = b_norm * b_norm;
  std::size_t it = 0;
  while (std::sqrt(rr) > opts.rel_tol * b_norm) {
    if (it == max_iter) {
      throw SolverError("Darcy CG did not converge in " + std::to_string(max_iter) + " iterations (relative residual " +
                        std::to_string(std::sqrt(rr) / b_norm) + ")");
    }
    s.apply(p, ap);
    const double alpha = rr / dot(p, ap);
    for (std::size_t i = 0; i < n; ++i) {
      u[i] += alpha * p[i];
      r[i] -= alpha * ap[i];
    }
    const double rr_next = dot(r, r);
    if (!std::isfinite(rr_next)) throw SolverError("Darcy CG produced a non-finite residual");
    const double beta = rr_next / rr;
    for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
    rr = rr_next;
    ++it;
  }
  result.u = Tensor({m, m}, std::move(u));
  result.iterations = it;
  result.relative_residual = std::sqrt(rr) / b_norm;
  return result;
}

Tensor threshold_coefficient(const Tensor& field, double high, double low) {
  Tensor out(field.shape());
  for (std::size_t i = 0; i < field.size(); ++i) out[i] = field[i] > 0.0 ? high : low;
  return out;
}

Tensor darcy_coefficient_sample(const Shape& extents, std::uint64_t seed) {
  return threshold_coefficient(grf_sample(extents, GrfSpec{2.0, 3.0 / (2.0 * std::numbers::pi), 1.0}, seed));
}

}  // namespace lnop
