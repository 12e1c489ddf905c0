#include "lnop/train/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>
#include <thread>

#include <sys/utsname.h>

#include "lnop/error.hpp"
#include "lnop/io/binary.hpp"
#include "lnop/tensor/ops.hpp"
#include "lnop/tensor/optim.hpp"
#include "lnop/version.hpp"

namespace lnop {
namespace {

Var sample_loss(LossKind kind, const Var& pred, const Tensor& target) {
  return kind == LossKind::relative_l2 ? relative_l2_loss(pred, target) : mse_loss(pred, target);
}

void write_outputs(const std::filesystem::path& dir, const OperatorModel& model, const RunReport& report,
                   bool checkpoint) {
  std::filesystem::create_directories(dir);
  if (checkpoint) save_checkpoint(model, dir / "model.lnop");
  io::write_text(dir / "report.json", report.to_json().dump(2) + "\n");
  io::write_text(dir / "eval.csv", report.final_eval.to_csv());
}

}  // namespace

nlohmann::json version_stamp() {
  return {{"lnop", LNOP_VERSION}, {"git", LNOP_GIT_DESCRIBE}, {"compiler", __VERSION__}};
}

nlohmann::json machine_descriptor() {
  nlohmann::json m{{"hardware_threads", std::thread::hardware_concurrency()}};
  utsname u{};
  if (uname(&u) == 0) {
    m["system"] = u.sysname;
    m["release"] = u.release;
    m["arch"] = u.machine;
  }
  return m;
}

nlohmann::json RunReport::to_json() const {
  nlohmann::json rel = nlohmann::json::object();
  for (const auto& [res, values] : test_rel_l2) rel[std::to_string(res)] = values;
  return {{"epochs", epochs},
          {"train_loss", train_loss},
          {"lr", lr},
          {"per_epoch_seconds", per_epoch_seconds},
          {"eval_epochs", eval_epochs},
          {"test_rel_l2", rel},
          {"final_eval", final_eval.to_json()},
          {"param_counts",
           {{"per_block",
             {{"forward", per_block.forward},
              {"mix", per_block.mix},
              {"inverse", per_block.inverse},
              {"channel", per_block.channel},
              {"channel_bias", per_block.channel_bias},
              {"transform_total", per_block.transform_total()}}},
            {"total", total_params}}},
          {"config", config},
          {"model", model},
          {"seed", seed},
          {"version", version_stamp()},
          {"machine", machine_descriptor()},
          {"choices",
           {{"training_loss", "mean per-sample relative L2 unless optim.loss=mse"},
            {"channel_map_bias", true},
            {"positional_encoding", "normalised coordinates appended before the lift"}}}};
}

ModelConfig model_config_for(const TrainConfig& config, const PdeDataset& train_set) {
  ModelConfig m;
  m.arch = config.model.arch;
  m.in_channels = train_set.in_channels;
  m.out_channels = train_set.out_channels;
  m.width = config.model.width;
  m.dims = train_set.grid.extents;
  if (config.model.modes.size() == 1) {
    m.modes.assign(m.dims.size(), config.model.modes[0]);
  } else if (config.model.modes.size() == m.dims.size()) {
    m.modes = config.model.modes;
  } else {
    throw ConfigError("config key 'model.modes' lists " + std::to_string(config.model.modes.size()) +
                      " entries for a grid of rank " + std::to_string(m.dims.size()));
  }
  m.blocks = config.model.blocks;
  m.positional_encoding = config.model.positional_encoding;
  m.mix_init = config.model.mix_init;
  m.seed = config.seed;
  m.validate();
  return m;
}

std::pair<PdeDataset, PdeDataset> load_split(const TrainConfig& config) {
  const PdeDataset all = dataset_read(config.data.train);
  PdeDataset train_set, test_set;
  if (config.data.test.empty()) {
    if (config.data.n_test >= all.samples.size()) {
      throw ConfigError("config key 'data.n_test' (" + std::to_string(config.data.n_test) +
                        ") leaves no training samples in '" + config.data.train + "'");
    }
    const std::size_t available = all.samples.size() - config.data.n_test;
    const std::size_t n_train = config.data.n_train ? config.data.n_train : available;
    if (n_train > available) {
      throw ConfigError("config key 'data.n_train' (" + std::to_string(n_train) + ") exceeds the " +
                        std::to_string(available) + " samples not held out");
    }
    train_set = take(all, 0, n_train);
    test_set = take(all, all.samples.size() - config.data.n_test, config.data.n_test);
  } else {
    const std::size_t n_train = config.data.n_train ? config.data.n_train : all.samples.size();
    train_set = take(all, 0, n_train);
    const PdeDataset test_all = dataset_read(config.data.test);
    test_set = take(test_all, 0, config.data.n_test ? config.data.n_test : test_all.samples.size());
  }
  if (config.data.resolution) train_set = downsample(train_set, train_set.grid.at_resolution(config.data.resolution));
  return {std::move(train_set), std::move(test_set)};
}

TrainResult train(const TrainConfig& config, const PdeDataset& train_set, const PdeDataset& test_set,
                  unsigned threads) {
  config.validate();
  train_set.validate();
  if (train_set.samples.empty()) throw ConfigError("training set is empty");
  OperatorModel model(model_config_for(config, train_set));

  const std::size_t train_res = train_set.grid.extents.front();
  std::vector<std::size_t> resolutions = config.data.eval_resolutions;
  if (resolutions.empty()) resolutions.push_back(train_res);

  RunReport report;
  report.epochs = config.optim.epochs;
  report.config = config.to_json();
  report.config["optim"]["batch_size"] = effective_batch_size(config, train_set.grid.extents.size());
  report.model = model.config().to_json();
  report.seed = config.seed;
  report.per_block = model.block_params();
  report.total_params = model.parameter_count();

  const std::size_t n = train_set.samples.size();
  const std::size_t batch = std::min(effective_batch_size(config, train_set.grid.extents.size()), n);
  auto params = model.parameters();
  const std::filesystem::path out_dir = config.output.dir;
  std::vector<std::size_t> order(n);

  for (std::size_t epoch = 0; epoch < config.optim.epochs; ++epoch) {
    const double lr = step_lr(static_cast<int>(epoch), config.optim.lr, static_cast<int>(config.optim.schedule_period),
                              config.optim.schedule_factor);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(config.seed + epoch);
    std::shuffle(order.begin(), order.end(), rng);

    const auto t0 = std::chrono::steady_clock::now();
    double loss_sum = 0.0;
    for (std::size_t start = 0, b = 0; start < n; start += batch, ++b) {
      const std::size_t end = std::min(start + batch, n);
      Tape tape;
      Var total;
      for (std::size_t i = start; i < end; ++i) {
        const auto& s = train_set.samples[order[i]];
        Var l = sample_loss(config.optim.loss, model.forward(tape, s.input), s.target);
        total = total ? add(total, l) : l;
      }
      const Var mean = scale(total, 1.0 / static_cast<double>(end - start));
      const double value = mean.value().item();
      if (!std::isfinite(value)) {
        throw NumericalError("non-finite training loss at epoch " + std::to_string(epoch + 1) + ", batch " +
                             std::to_string(b + 1));
      }
      zero_grad(params);
      tape.backward(mean);
      adam_step(params, AdamOptions{.lr = lr});
      loss_sum += value * static_cast<double>(end - start);
    }
    const auto t1 = std::chrono::steady_clock::now();
    report.per_epoch_seconds.push_back(std::chrono::duration<double>(t1 - t0).count());
    report.train_loss.push_back(loss_sum / static_cast<double>(n));
    report.lr.push_back(lr);

    const bool last = epoch + 1 == config.optim.epochs;
    if (last || (epoch + 1) % config.optim.eval_every == 0) {
      const EvalTable table = evaluate(model, test_set, resolutions, threads);
      report.eval_epochs.push_back(epoch + 1);
      for (const auto& row : table.rows) report.test_rel_l2[row.resolution].push_back(row.rel_l2_percent);
      if (last) report.final_eval = table;
    }
    if (!out_dir.empty() && config.output.checkpoint && !last && (epoch + 1) % config.optim.schedule_period == 0) {
      std::filesystem::create_directories(out_dir);
      save_checkpoint(model, out_dir / ("model_epoch" + std::to_string(epoch + 1) + ".lnop"));
    }
  }
  if (!out_dir.empty()) write_outputs(out_dir, model, report, config.output.checkpoint);
  return {std::move(model), std::move(report)};
}

TrainResult train(const TrainConfig& config, unsigned threads) {
  config.validate();
  auto [train_set, test_set] = load_split(config);
  return train(config, train_set, test_set, threads);
}

}  // namespace lnop
