#pragma once

#include <vector>

#include <nlohmann/json.hpp>

#include "lnop/data/dataset.hpp"
#include "lnop/model/operator_model.hpp"

namespace lnop {

struct BenchOptions {
  std::size_t warmup_epochs = 1;
  std::size_t timed_epochs = 5;
  std::size_t batch_size = 20;
  double lr = 1e-3;
  /// Cap on samples per epoch (0: all).
  std::size_t max_samples = 0;
};

struct BenchEntry {
  ModelConfig model;
  std::vector<double> epoch_seconds;
  double median_epoch_seconds = 0.0;
  BlockParamCount per_block;
  std::size_t total_params = 0;
};

struct BenchReport {
  std::vector<BenchEntry> entries;
  BenchOptions options;

  /// entries[a].median / entries[b].median
  double time_ratio(std::size_t a, std::size_t b) const;
  nlohmann::json to_json() const;
};

/// Trains each model configuration for warmup + timed epochs on `data`
/// (Adam, relative L2 loss) and records the median timed epoch. Needs at
/// least two configurations. Epochs are timed like train(): the
/// mini-batch loop only.
BenchReport bench(const std::vector<ModelConfig>& configs, const PdeDataset& data, const BenchOptions& options);

/// Median of a non-empty sample.
double median(std::vector<double> values);

}  // namespace lnop
