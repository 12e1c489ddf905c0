#pragma once

#include <complex>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "lnop/blocks/spectral.hpp"
#include "lnop/blocks/transform_block.hpp"
#include "lnop/model/operator_model.hpp"
#include "lnop/tensor/tensor.hpp"

// Deliberately naive reference implementations. They index every element
// explicitly and share no code with the library kernels they check.
namespace lnop::verify {

Tensor random_tensor(const Shape& shape, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0);

/// out[.., j, ..] = sum_i x[.., i, ..] w[i, j] by multi-index loops.
Tensor naive_contract(const Tensor& x, const Tensor& w, std::size_t axis);

/// z[c, m_1..m_n] = sum_{x_1..x_n} v[c, x_1..x_n] prod_i L[i][x_i, m_i].
Tensor naive_separable(const Tensor& v, const std::vector<Tensor>& factors);

/// out[j, m] = sum_i R[i, j, m] z[i, m].
Tensor naive_mode_mix(const Tensor& z, const Tensor& mix);

/// relu(W.v + b + N(R.M(v))) from the oracles above.
Tensor naive_block_update(const Tensor& v, const TransformBlockParams& p);

/// Truncated DFT X[f] = sum_x v[x] exp(-2 pi i f.x/d), f_i in [0, k_i), over all axes.
std::vector<std::complex<double>> naive_dft(const Tensor& v, const Shape& modes);

/// Zero-padded inverse: (1/prod d) sum_f w(f) Re(X[f] exp(2 pi i f.x/d)) with
/// weight 2 on last-axis frequencies strictly between 0 and d/2.
Tensor naive_idft_padded(const std::vector<std::complex<double>>& coeffs, const Shape& modes, const Shape& dims);

struct GradCheckResult {
  std::size_t checked = 0;
  std::size_t failed = 0;
  double worst_rel = 0.0;
  std::string worst_param;

  bool passed() const noexcept { return checked > 0 && failed == 0; }
};

struct GradCheckOptions {
  double step = 1e-5;
  double rel_tol = 1e-4;
  double abs_tol = 1e-7;
};

/// Central differences of `loss` against the reverse-mode gradient already
/// stored in each parameter's grad. `loss` must evaluate without a tape.
GradCheckResult finite_difference_check(std::vector<Parameter*> params, const std::function<double()>& loss,
                                        const GradCheckOptions& options = {});

/// Full-model check: relative-L2 loss of model(input) against target.
GradCheckResult check_model_gradients(OperatorModel& model, const Tensor& input, const Tensor& target,
                                      const GradCheckOptions& options = {});

/// Adam on one scalar parameter, written out step by step.
struct ScalarAdam {
  double lr, beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  double m = 0.0, v = 0.0;
  int t = 0;
  double step(double theta, double grad);
};

}  // namespace lnop::verify
