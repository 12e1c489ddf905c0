#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lnop/data/dataset.hpp"
#include "lnop/model/operator_model.hpp"

namespace lnop {

struct ResolutionResult {
  std::size_t resolution = 0;  ///< spatial extent evaluated at
  Shape extents;               ///< full grid
  Shape ratio;                 ///< per-axis factor over the training grid
  std::string pipeline;        ///< "native" at ratio 1, else the superres pipeline
  double rel_l2_percent = 0.0;
};

struct EvalTable {
  std::vector<ResolutionResult> rows;

  nlohmann::json to_json() const;
  /// resolution,extents,ratio,pipeline,rel_l2_percent
  std::string to_csv() const;
};

/// Model outputs for every sample, in order. Samples are spread across up to
/// `threads` workers; the model is read-only so results do not depend on it.
std::vector<Tensor> predict(const OperatorModel& model, const PdeDataset& data, unsigned threads = 1);

/// Mean % relative L2 of the model on `test` subsampled to each spatial
/// resolution. Ratio 1 runs forward(); larger ratios run forward_superres().
EvalTable evaluate(const OperatorModel& model, const PdeDataset& test, const std::vector<std::size_t>& resolutions,
                   unsigned threads = 1);

}  // namespace lnop
