#include "lnop/train/metrics.hpp"

#include <cmath>

#include "lnop/error.hpp"

namespace lnop {

double relative_l2_percent(const Tensor& pred, const Tensor& target) {
  if (pred.shape() != target.shape()) {
    throw DimensionError("relative L2: prediction " + to_string(pred.shape()) + " vs target " +
                         to_string(target.shape()));
  }
  double diff = 0.0, norm = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - target[i];
    diff += d * d;
    norm += target[i] * target[i];
  }
  if (norm == 0.0) throw MetricError("relative L2 undefined for a zero-norm target");
  const double r = 100.0 * std::sqrt(diff) / std::sqrt(norm);
  if (!std::isfinite(r)) throw NumericalError("relative L2 is not finite");
  return r;
}

double mean_relative_l2_percent(std::span<const Tensor> preds, std::span<const Tensor> targets) {
  if (preds.size() != targets.size() || preds.empty()) {
    throw DimensionError("mean relative L2 needs equally many (>= 1) predictions and targets");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < preds.size(); ++i) s += relative_l2_percent(preds[i], targets[i]);
  return s / static_cast<double>(preds.size());
}

}  // namespace lnop
