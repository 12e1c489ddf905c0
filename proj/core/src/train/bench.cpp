#include "lnop/train/bench.hpp"

#include <algorithm>
#include <chrono>

#include "lnop/error.hpp"
#include "lnop/tensor/ops.hpp"
#include "lnop/tensor/optim.hpp"
#include "lnop/train/trainer.hpp"

namespace lnop {
namespace {

double run_epoch(OperatorModel& model, const PdeDataset& data, const BenchOptions& opt) {
  auto params = model.parameters();
  const std::size_t n = opt.max_samples ? std::min(opt.max_samples, data.samples.size()) : data.samples.size();
  const std::size_t batch = std::max<std::size_t>(1, std::min(opt.batch_size, n));
  const auto t0 = std::chrono::steady_clock::now();
  for (std::size_t start = 0; start < n; start += batch) {
    const std::size_t end = std::min(start + batch, n);
    Tape tape;
    Var total;
    for (std::size_t i = start; i < end; ++i) {
      Var l = relative_l2_loss(model.forward(tape, data.samples[i].input), data.samples[i].target);
      total = total ? add(total, l) : l;
    }
    const Var mean = scale(total, 1.0 / static_cast<double>(end - start));
    zero_grad(params);
    tape.backward(mean);
    adam_step(params, AdamOptions{.lr = opt.lr});
  }
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

double median(std::vector<double> values) {
  if (values.empty()) throw ContractError("median of an empty sample");
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

double BenchReport::time_ratio(std::size_t a, std::size_t b) const {
  return entries.at(a).median_epoch_seconds / entries.at(b).median_epoch_seconds;
}

nlohmann::json BenchReport::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& e : entries) {
    rows.push_back({{"arch", to_string(e.model.arch)},
                    {"model", e.model.to_json()},
                    {"epoch_seconds", e.epoch_seconds},
                    {"median_epoch_seconds", e.median_epoch_seconds},
                    {"per_block",
                     {{"forward", e.per_block.forward},
                      {"mix", e.per_block.mix},
                      {"inverse", e.per_block.inverse},
                      {"channel", e.per_block.channel},
                      {"transform_total", e.per_block.transform_total()}}},
                    {"fourier_minus_learnable_per_block",
                     fourier_minus_learnable(e.model.width, e.model.dims, e.model.modes)},
                    {"total_params", e.total_params}});
  }
  return {{"entries", rows},
          {"warmup_epochs", options.warmup_epochs},
          {"timed_epochs", options.timed_epochs},
          {"batch_size", options.batch_size},
          {"version", version_stamp()},
          {"machine", machine_descriptor()}};
}

BenchReport bench(const std::vector<ModelConfig>& configs, const PdeDataset& data, const BenchOptions& options) {
  if (configs.size() < 2) throw ConfigError("bench needs at least two model configurations");
  if (options.timed_epochs < 1) throw ConfigError("bench needs at least one timed epoch");
  data.validate();
  if (data.samples.empty()) throw ConfigError("bench dataset is empty");
  BenchReport report;
  report.options = options;
  for (const auto& cfg : configs) {
    if (cfg.dims != data.grid.extents) {
      throw DimensionError("bench model grid " + to_string(cfg.dims) + " differs from dataset grid " +
                           to_string(data.grid.extents));
    }
    OperatorModel model(cfg);
    BenchEntry e;
    e.model = cfg;
    e.per_block = model.block_params();
    e.total_params = model.parameter_count();
    for (std::size_t i = 0; i < options.warmup_epochs; ++i) run_epoch(model, data, options);
    for (std::size_t i = 0; i < options.timed_epochs; ++i) e.epoch_seconds.push_back(run_epoch(model, data, options));
    e.median_epoch_seconds = median(e.epoch_seconds);
    report.entries.push_back(std::move(e));
  }
  return report;
}

}  // namespace lnop
