#pragma once

#include <cstddef>

#include "lnop/tensor/autodiff.hpp"
#include "lnop/tensor/tensor.hpp"

namespace lnop {

// Plain tensor kernels (no tape).

/// out[..., j, ...] = sum_i x[..., i, ...] * w[i, j] along `axis`.
Tensor contract_axis(const Tensor& x, const Tensor& w, std::size_t axis);
Tensor transpose(const Tensor& matrix);
Tensor add(const Tensor& x, const Tensor& y);
Tensor scale(const Tensor& x, double c);

// Differentiable operations. Each records a node on the inputs' tape when any
// input is tracked, and returns an untracked value otherwise. Shapes must agree
// exactly: the only broadcast is scalar * tensor in scale().

Var contract_axis(const Var& x, const Var& w, std::size_t axis);
Var add(const Var& x, const Var& y);
Var sub(const Var& x, const Var& y);
Var mul(const Var& x, const Var& y);
Var scale(const Var& x, double c);
/// max(x, 0); the subgradient at exactly 0 is 0.
Var relu(const Var& x);
/// x + b broadcast along `axis`, where b has shape (x.extent(axis)).
Var add_bias(const Var& x, const Var& bias, std::size_t axis);
/// Sum of all entries, as a rank-0 tensor.
Var sum(const Var& x);

/// ||pred - target||_2 / ||target||_2 as a fraction (rank-0).
/// At pred == target the gradient is taken as zero.
Var relative_l2_loss(const Var& pred, const Tensor& target);
/// mean((pred - target)^2) (rank-0).
Var mse_loss(const Var& pred, const Tensor& target);

/// Throws NumericalError naming `what` if `t` holds NaN or Inf.
void require_finite(const Tensor& t, const char* what);

}  // namespace lnop
