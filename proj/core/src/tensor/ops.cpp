#include "lnop/tensor/ops.hpp"

#include <cmath>
#include <numeric>

#include "lnop/error.hpp"

namespace lnop {
namespace {

struct AxisSplit {
  std::size_t outer = 1;
  std::size_t extent = 1;
  std::size_t inner = 1;
};

AxisSplit split_at(const Shape& shape, std::size_t axis) {
  AxisSplit s;
  for (std::size_t i = 0; i < axis; ++i) s.outer *= shape[i];
  s.extent = shape[axis];
  for (std::size_t i = axis + 1; i < shape.size(); ++i) s.inner *= shape[i];
  return s;
}

// out[o, j, n] += sum_i x[o, i, n] * w[i, j]
void contract_kernel(const double* x, const double* w, double* out, const AxisSplit& s, std::size_t k) {
  const std::size_t d = s.extent;
  for (std::size_t o = 0; o < s.outer; ++o) {
    const double* xo = x + o * d * s.inner;
    double* oo = out + o * k * s.inner;
    if (s.inner == 1) {
      for (std::size_t i = 0; i < d; ++i) {
        const double xv = xo[i];
        const double* wr = w + i * k;
        for (std::size_t j = 0; j < k; ++j) oo[j] += xv * wr[j];
      }
      continue;
    }
    for (std::size_t i = 0; i < d; ++i) {
      const double* xr = xo + i * s.inner;
      for (std::size_t j = 0; j < k; ++j) {
        const double wij = w[i * k + j];
        double* orow = oo + j * s.inner;
        for (std::size_t n = 0; n < s.inner; ++n) orow[n] += wij * xr[n];
      }
    }
  }
}

// dw[i, j] += sum_{o, n} x[o, i, n] * g[o, j, n]
void contract_weight_grad(const double* x, const double* g, double* dw, const AxisSplit& s, std::size_t k) {
  const std::size_t d = s.extent;
  for (std::size_t o = 0; o < s.outer; ++o) {
    const double* xo = x + o * d * s.inner;
    const double* go = g + o * k * s.inner;
    if (s.inner == 1) {
      for (std::size_t i = 0; i < d; ++i) {
        const double xv = xo[i];
        double* dr = dw + i * k;
        for (std::size_t j = 0; j < k; ++j) dr[j] += xv * go[j];
      }
      continue;
    }
    for (std::size_t i = 0; i < d; ++i) {
      const double* xr = xo + i * s.inner;
      for (std::size_t j = 0; j < k; ++j) {
        const double* gr = go + j * s.inner;
        double acc = 0.0;
        for (std::size_t n = 0; n < s.inner; ++n) acc += xr[n] * gr[n];
        dw[i * k + j] += acc;
      }
    }
  }
}

void check_same_shape(const Tensor& x, const Tensor& y, const char* op) {
  if (x.shape() != y.shape()) {
    throw DimensionError(std::string(op) + ": shape mismatch " + to_string(x.shape()) + " vs " +
                         to_string(y.shape()));
  }
}

Var finish(Tensor value, const std::vector<Var>& inputs, Tape* tape, const char* what, BackwardFn fn) {
  require_finite(value, what);
  if (!tape) return Var(std::move(value));
  return tape->record(std::move(value), inputs, std::move(fn));
}

}  // namespace

void require_finite(const Tensor& t, const char* what) {
  if (!t.all_finite()) throw NumericalError(std::string("non-finite value produced by ") + what);
}

Tensor contract_axis(const Tensor& x, const Tensor& w, std::size_t axis) {
  if (w.rank() != 2) throw DimensionError("contract_axis: weight must be a matrix, got " + to_string(w.shape()));
  if (axis >= x.rank()) {
    throw DimensionError("contract_axis: axis " + std::to_string(axis) + " out of range for input " +
                         to_string(x.shape()));
  }
  if (x.shape()[axis] != w.shape()[0]) {
    throw DimensionError("contract_axis: input " + to_string(x.shape()) + " axis " + std::to_string(axis) +
                         " does not match weight " + to_string(w.shape()));
  }
  const auto split = split_at(x.shape(), axis);
  const std::size_t k = w.shape()[1];
  Shape out_shape = x.shape();
  out_shape[axis] = k;
  Tensor out(out_shape);
  contract_kernel(x.raw(), w.raw(), out.raw(), split, k);
  return out;
}

Tensor transpose(const Tensor& m) {
  if (m.rank() != 2) throw DimensionError("transpose expects a matrix, got " + to_string(m.shape()));
  const auto r = m.shape()[0], c = m.shape()[1];
  Tensor t(Shape{c, r});
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) t[j * r + i] = m[i * c + j];
  return t;
}

Tensor add(const Tensor& x, const Tensor& y) {
  check_same_shape(x, y, "add");
  Tensor out = x;
  out += y;
  return out;
}

Tensor scale(const Tensor& x, double c) {
  Tensor out = x;
  for (auto& v : out.data()) v *= c;
  return out;
}

Var contract_axis(const Var& x, const Var& w, std::size_t axis) {
  Tape* tape = common_tape({&x, &w});
  Tensor out = contract_axis(x.value(), w.value(), axis);
  return finish(std::move(out), {x, w}, tape, "contract_axis", [x, w, axis](const Tensor& g, GradAccess& grads) {
    const auto split = split_at(x.shape(), axis);
    const std::size_t k = w.shape()[1];
    if (grads.needed(0)) {
      const Tensor wt = transpose(w.value());
      contract_kernel(g.raw(), wt.raw(), grads.at(0).raw(), AxisSplit{split.outer, k, split.inner}, split.extent);
    }
    if (grads.needed(1)) contract_weight_grad(x.value().raw(), g.raw(), grads.at(1).raw(), split, k);
  });
}

Var add(const Var& x, const Var& y) {
  Tape* tape = common_tape({&x, &y});
  Tensor out = add(x.value(), y.value());
  return finish(std::move(out), {x, y}, tape, "add", [](const Tensor& g, GradAccess& grads) {
    if (grads.needed(0)) grads.at(0) += g;
    if (grads.needed(1)) grads.at(1) += g;
  });
}

Var sub(const Var& x, const Var& y) {
  Tape* tape = common_tape({&x, &y});
  check_same_shape(x.value(), y.value(), "sub");
  Tensor out = x.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= y.value()[i];
  return finish(std::move(out), {x, y}, tape, "sub", [](const Tensor& g, GradAccess& grads) {
    if (grads.needed(0)) grads.at(0) += g;
    if (grads.needed(1)) {
      auto& gy = grads.at(1);
      for (std::size_t i = 0; i < g.size(); ++i) gy[i] -= g[i];
    }
  });
}

Var mul(const Var& x, const Var& y) {
  Tape* tape = common_tape({&x, &y});
  check_same_shape(x.value(), y.value(), "mul");
  Tensor out = x.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= y.value()[i];
  return finish(std::move(out), {x, y}, tape, "mul", [x, y](const Tensor& g, GradAccess& grads) {
    if (grads.needed(0)) {
      auto& gx = grads.at(0);
      for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i] * y.value()[i];
    }
    if (grads.needed(1)) {
      auto& gy = grads.at(1);
      for (std::size_t i = 0; i < g.size(); ++i) gy[i] += g[i] * x.value()[i];
    }
  });
}

Var scale(const Var& x, double c) {
  Tape* tape = common_tape({&x});
  return finish(scale(x.value(), c), {x}, tape, "scale", [c](const Tensor& g, GradAccess& grads) {
    if (!grads.needed(0)) return;
    auto& gx = grads.at(0);
    for (std::size_t i = 0; i < g.size(); ++i) gx[i] += c * g[i];
  });
}

Var relu(const Var& x) {
  Tape* tape = common_tape({&x});
  Tensor out = x.value();
  for (auto& v : out.data()) v = v > 0.0 ? v : 0.0;
  return finish(std::move(out), {x}, tape, "relu", [x](const Tensor& g, GradAccess& grads) {
    if (!grads.needed(0)) return;
    auto& gx = grads.at(0);
    const auto& xv = x.value();
    for (std::size_t i = 0; i < g.size(); ++i)
      if (xv[i] > 0.0) gx[i] += g[i];
  });
}

Var add_bias(const Var& x, const Var& bias, std::size_t axis) {
  Tape* tape = common_tape({&x, &bias});
  if (axis >= x.value().rank()) {
    throw DimensionError("add_bias: axis " + std::to_string(axis) + " out of range for " + to_string(x.shape()));
  }
  if (bias.value().rank() != 1 || bias.shape()[0] != x.shape()[axis]) {
    throw DimensionError("add_bias: bias " + to_string(bias.shape()) + " does not match axis " +
                         std::to_string(axis) + " of " + to_string(x.shape()));
  }
  const auto split = split_at(x.shape(), axis);
  Tensor out = x.value();
  const double* b = bias.value().raw();
  for (std::size_t o = 0; o < split.outer; ++o)
    for (std::size_t c = 0; c < split.extent; ++c) {
      double* row = out.raw() + (o * split.extent + c) * split.inner;
      for (std::size_t n = 0; n < split.inner; ++n) row[n] += b[c];
    }
  return finish(std::move(out), {x, bias}, tape, "add_bias", [split](const Tensor& g, GradAccess& grads) {
    if (grads.needed(0)) grads.at(0) += g;
    if (grads.needed(1)) {
      auto& gb = grads.at(1);
      for (std::size_t o = 0; o < split.outer; ++o)
        for (std::size_t c = 0; c < split.extent; ++c) {
          const double* row = g.raw() + (o * split.extent + c) * split.inner;
          double acc = 0.0;
          for (std::size_t n = 0; n < split.inner; ++n) acc += row[n];
          gb[c] += acc;
        }
    }
  });
}

Var sum(const Var& x) {
  Tape* tape = common_tape({&x});
  const auto& xv = x.value().data();
  Tensor out = Tensor::scalar(std::accumulate(xv.begin(), xv.end(), 0.0));
  return finish(std::move(out), {x}, tape, "sum", [](const Tensor& g, GradAccess& grads) {
    if (!grads.needed(0)) return;
    auto& gx = grads.at(0);
    const double s = g[0];
    for (auto& v : gx.data()) v += s;
  });
}

Var relative_l2_loss(const Var& pred, const Tensor& target) {
  check_same_shape(pred.value(), target, "relative_l2_loss");
  Tape* tape = common_tape({&pred});
  const double tnorm = l2_norm(target.data());
  if (!(tnorm > 0.0)) throw MetricError("relative L2 undefined for a zero-norm target");
  Tensor diff = pred.value();
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] -= target[i];
  const double dnorm = l2_norm(diff.data());
  Tensor out = Tensor::scalar(dnorm / tnorm);
  return finish(std::move(out), {pred}, tape, "relative_l2_loss",
                [diff = std::move(diff), dnorm, tnorm](const Tensor& g, GradAccess& grads) {
                  if (!grads.needed(0) || dnorm == 0.0) return;
                  auto& gp = grads.at(0);
                  const double c = g[0] / (dnorm * tnorm);
                  for (std::size_t i = 0; i < diff.size(); ++i) gp[i] += c * diff[i];
                });
}

Var mse_loss(const Var& pred, const Tensor& target) {
  check_same_shape(pred.value(), target, "mse_loss");
  Tape* tape = common_tape({&pred});
  Tensor diff = pred.value();
  double acc = 0.0;
  for (std::size_t i = 0; i < diff.size(); ++i) {
    diff[i] -= target[i];
    acc += diff[i] * diff[i];
  }
  const double n = static_cast<double>(diff.size());
  return finish(Tensor::scalar(acc / n), {pred}, tape, "mse_loss",
                [diff = std::move(diff), n](const Tensor& g, GradAccess& grads) {
                  if (!grads.needed(0)) return;
                  auto& gp = grads.at(0);
                  const double c = 2.0 * g[0] / n;
                  for (std::size_t i = 0; i < diff.size(); ++i) gp[i] += c * diff[i];
                });
}

}  // namespace lnop
