#include "lnop/tensor/optim.hpp"

#include <cmath>

#include "lnop/error.hpp"

namespace lnop {

void adam_step(std::span<Parameter* const> params, const AdamOptions& opt) {
  for (const Parameter* p : params) {
    if (!p->grad.all_finite()) throw NumericalError("non-finite gradient in parameter '" + p->name + "'");
  }
  for (Parameter* p : params) {
    p->step += 1;
    const double bc1 = 1.0 - std::pow(opt.beta1, static_cast<double>(p->step));
    const double bc2 = 1.0 - std::pow(opt.beta2, static_cast<double>(p->step));
    auto value = p->value.data();
    auto grad = p->grad.data();
    auto m = p->first_moment.data();
    auto v = p->second_moment.data();
    for (std::size_t i = 0; i < value.size(); ++i) {
      const double g = grad[i] + opt.weight_decay * value[i];
      m[i] = opt.beta1 * m[i] + (1.0 - opt.beta1) * g;
      v[i] = opt.beta2 * v[i] + (1.0 - opt.beta2) * g * g;
      const double m_hat = m[i] / bc1;
      const double v_hat = v[i] / bc2;
      value[i] -= opt.lr * m_hat / (std::sqrt(v_hat) + opt.eps);
    }
  }
}

double step_lr(int epoch, double lr0, int period, double factor) {
  if (epoch < 0 || period <= 0) throw ConfigError("step_lr requires epoch >= 0 and period > 0");
  return lr0 * std::pow(factor, epoch / period);
}

void zero_grad(std::span<Parameter* const> params) {
  for (Parameter* p : params) p->zero_grad();
}

}  // namespace lnop
