#include "lnop/verify/oracles.hpp"

#include <cmath>
#include <numbers>

#include "lnop/error.hpp"
#include "lnop/tensor/ops.hpp"

namespace lnop::verify {
namespace {

// Decomposes a flat row-major index into a multi-index.
std::vector<std::size_t> unravel(std::size_t flat, const Shape& shape) {
  std::vector<std::size_t> idx(shape.size());
  for (std::size_t a = shape.size(); a-- > 0;) {
    idx[a] = flat % shape[a];
    flat /= shape[a];
  }
  return idx;
}

std::size_t ravel(const std::vector<std::size_t>& idx, const Shape& shape) {
  std::size_t flat = 0;
  for (std::size_t a = 0; a < shape.size(); ++a) flat = flat * shape[a] + idx[a];
  return flat;
}

}  // namespace

Tensor random_tensor(const Shape& shape, std::mt19937_64& rng, double lo, double hi) {
  Tensor t(shape);
  std::uniform_real_distribution<double> d(lo, hi);
  for (auto& v : t.data()) v = d(rng);
  return t;
}

Tensor naive_contract(const Tensor& x, const Tensor& w, std::size_t axis) {
  Shape out_shape = x.shape();
  out_shape[axis] = w.shape()[1];
  Tensor out(out_shape);
  for (std::size_t o = 0; o < out.size(); ++o) {
    auto idx = unravel(o, out_shape);
    const std::size_t j = idx[axis];
    double s = 0.0;
    for (std::size_t i = 0; i < x.shape()[axis]; ++i) {
      idx[axis] = i;
      s += x[ravel(idx, x.shape())] * w[i * w.shape()[1] + j];
    }
    out[o] = s;
  }
  return out;
}

Tensor naive_separable(const Tensor& v, const std::vector<Tensor>& factors) {
  Shape out_shape{v.shape()[0]};
  for (const auto& f : factors) out_shape.push_back(f.shape()[1]);
  Tensor out(out_shape);
  for (std::size_t o = 0; o < out.size(); ++o) {
    const auto oi = unravel(o, out_shape);
    double s = 0.0;
    for (std::size_t q = 0; q < v.size(); ++q) {
      const auto vi = unravel(q, v.shape());
      if (vi[0] != oi[0]) continue;
      double w = v[q];
      for (std::size_t a = 0; a < factors.size(); ++a) w *= factors[a][vi[a + 1] * factors[a].shape()[1] + oi[a + 1]];
      s += w;
    }
    out[o] = s;
  }
  return out;
}

Tensor naive_mode_mix(const Tensor& z, const Tensor& mix) {
  const std::size_t c = z.shape()[0];
  const std::size_t modes = z.size() / c;
  Tensor out(z.shape());
  for (std::size_t j = 0; j < c; ++j)
    for (std::size_t m = 0; m < modes; ++m) {
      double s = 0.0;
      for (std::size_t i = 0; i < c; ++i) s += mix[(i * c + j) * modes + m] * z[i * modes + m];
      out[j * modes + m] = s;
    }
  return out;
}

Tensor naive_block_update(const Tensor& v, const TransformBlockParams& p) {
  std::vector<Tensor> fwd, inv;
  for (const auto& f : p.forward) fwd.push_back(f.value);
  for (const auto& b : p.inverse) inv.push_back(b.value);
  const Tensor spectral = naive_separable(naive_mode_mix(naive_separable(v, fwd), p.mix.value), inv);
  const std::size_t c = v.shape()[0];
  const std::size_t pts = v.size() / c;
  Tensor out(v.shape());
  for (std::size_t j = 0; j < c; ++j)
    for (std::size_t x = 0; x < pts; ++x) {
      double s = p.channel_bias.value[j] + spectral[j * pts + x];
      for (std::size_t i = 0; i < c; ++i) s += p.channel.value[i * c + j] * v[i * pts + x];
      out[j * pts + x] = s > 0.0 ? s : 0.0;
    }
  return out;
}

std::vector<std::complex<double>> naive_dft(const Tensor& v, const Shape& modes) {
  const Shape& dims = v.shape();
  std::vector<std::complex<double>> out(numel(modes));
  for (std::size_t fo = 0; fo < out.size(); ++fo) {
    const auto f = unravel(fo, modes);
    std::complex<double> s = 0.0;
    for (std::size_t xo = 0; xo < v.size(); ++xo) {
      const auto x = unravel(xo, dims);
      double phase = 0.0;
      for (std::size_t a = 0; a < dims.size(); ++a) {
        phase += static_cast<double>(f[a] * x[a]) / static_cast<double>(dims[a]);
      }
      s += v[xo] * std::polar(1.0, -2.0 * std::numbers::pi * phase);
    }
    out[fo] = s;
  }
  return out;
}

Tensor naive_idft_padded(const std::vector<std::complex<double>>& coeffs, const Shape& modes, const Shape& dims) {
  Tensor out(dims);
  const double norm = 1.0 / static_cast<double>(numel(dims));
  const std::size_t last = dims.size() - 1;
  for (std::size_t xo = 0; xo < out.size(); ++xo) {
    const auto x = unravel(xo, dims);
    double s = 0.0;
    for (std::size_t fo = 0; fo < coeffs.size(); ++fo) {
      const auto f = unravel(fo, modes);
      double phase = 0.0;
      for (std::size_t a = 0; a < dims.size(); ++a) {
        phase += static_cast<double>(f[a] * x[a]) / static_cast<double>(dims[a]);
      }
      const double w = (f[last] != 0 && 2 * f[last] != dims[last]) ? 2.0 : 1.0;
      s += w * (coeffs[fo] * std::polar(1.0, 2.0 * std::numbers::pi * phase)).real();
    }
    out[xo] = s * norm;
  }
  return out;
}

GradCheckResult finite_difference_check(std::vector<Parameter*> params, const std::function<double()>& loss,
                                        const GradCheckOptions& options) {
  GradCheckResult r;
  for (auto* p : params) {
    for (std::size_t i = 0; i < p->value.size(); ++i) {
      const double saved = p->value[i];
      p->value[i] = saved + options.step;
      const double up = loss();
      p->value[i] = saved - options.step;
      const double down = loss();
      p->value[i] = saved;
      const double numeric = (up - down) / (2.0 * options.step);
      const double analytic = p->grad.empty() ? 0.0 : p->grad[i];
      const double abs_err = std::abs(numeric - analytic);
      const double scale = std::max(std::abs(numeric), std::abs(analytic));
      const double rel = scale > 0.0 ? abs_err / scale : 0.0;
      ++r.checked;
      if (abs_err > options.abs_tol && rel > options.rel_tol) {
        ++r.failed;
        if (rel > r.worst_rel) {
          r.worst_rel = rel;
          r.worst_param = p->name + "[" + std::to_string(i) + "]";
        }
      }
    }
  }
  return r;
}

GradCheckResult check_model_gradients(OperatorModel& model, const Tensor& input, const Tensor& target,
                                      const GradCheckOptions& options) {
  auto params = model.parameters();
  for (auto* p : params) p->zero_grad();
  {
    Tape tape;
    tape.backward(relative_l2_loss(model.forward(tape, input), target));
  }
  auto loss = [&] {
    const Tensor pred = model.forward(input);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
      num += (pred[i] - target[i]) * (pred[i] - target[i]);
      den += target[i] * target[i];
    }
    return std::sqrt(num) / std::sqrt(den);
  };
  return finite_difference_check(params, loss, options);
}

double ScalarAdam::step(double theta, double grad) {
  ++t;
  m = beta1 * m + (1.0 - beta1) * grad;
  v = beta2 * v + (1.0 - beta2) * grad * grad;
  const double m_hat = m / (1.0 - std::pow(beta1, t));
  const double v_hat = v / (1.0 - std::pow(beta2, t));
  return theta - lr * m_hat / (std::sqrt(v_hat) + eps);
}

}  // namespace lnop::verify
