#include <algorithm>
#include <cmath>

#include "lnop/data/solvers.hpp"
#include "lnop/error.hpp"

namespace lnop {
namespace {

// Signed periodic distance x - c folded into [-1/2, 1/2).
double wrapped_offset(double x, double c) {
  double d = x - c;
  d -= std::floor(d + 0.5);
  return d;
}

}  // namespace

void AdvectionParams::validate() const {
  if (!(width > 0.0 && width < 1.0)) throw ConfigError("advection width omega must lie in (0, 1)");
  if (!std::isfinite(center) || !std::isfinite(height)) throw ConfigError("advection center/height must be finite");
  if (bump_scale && !(*bump_scale > 0.0)) throw ConfigError("advection bump scale must be > 0");
}

double advection_initial(const AdvectionParams& p, double x) {
  const double d = wrapped_offset(x, p.center);
  const double square = std::abs(d) <= p.width / 2.0 ? p.height : 0.0;
  const double ad = p.scale() * d;
  return square + std::sqrt(std::max(p.height * p.height - ad * ad, 0.0));
}

AdvectionPair advection_solution(const AdvectionParams& p, double t, std::size_t m) {
  p.validate();
  if (m == 0) throw DimensionError("advection grid must be non-empty");
  AdvectionPair out{Tensor({m}), Tensor({m})};
  for (std::size_t i = 0; i < m; ++i) {
    const double x = static_cast<double>(i) / static_cast<double>(m);
    out.u0[i] = advection_initial(p, x);
    out.ut[i] = advection_initial(p, x - t);
  }
  return out;
}

}  // namespace lnop
