#pragma once

#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lnop/data/dataset.hpp"
#include "lnop/model/operator_model.hpp"
#include "lnop/train/config.hpp"
#include "lnop/train/evaluate.hpp"

namespace lnop {

struct RunReport {
  std::size_t epochs = 0;
  /// Mean training loss of each epoch (a fraction for relative_l2).
  std::vector<double> train_loss;
  std::vector<double> lr;
  std::vector<double> per_epoch_seconds;
  /// 1-based epochs at which the test set was evaluated.
  std::vector<std::size_t> eval_epochs;
  /// resolution -> % relative L2 at each entry of eval_epochs.
  std::map<std::size_t, std::vector<double>> test_rel_l2;
  EvalTable final_eval;
  BlockParamCount per_block;
  std::size_t total_params = 0;
  nlohmann::json config;
  nlohmann::json model;
  std::uint64_t seed = 0;

  nlohmann::json to_json() const;
};

struct TrainResult {
  OperatorModel model;
  RunReport report;
};

/// Model configuration implied by a training config and its data.
ModelConfig model_config_for(const TrainConfig& config, const PdeDataset& train_set);

/// Mini-batch Adam on the mean per-sample loss. Each epoch shuffles with
/// mt19937_64(seed + epoch), uses lr = step_lr(epoch), and is timed on its
/// own (evaluation excluded). A non-finite loss throws NumericalError naming
/// the epoch and batch. Writes checkpoints and the report when
/// config.output.dir is set.
TrainResult train(const TrainConfig& config, const PdeDataset& train_set, const PdeDataset& test_set,
                  unsigned threads = 1);

/// Loads the datasets named in the config, splits and subsamples them, then
/// trains.
TrainResult train(const TrainConfig& config, unsigned threads = 1);

/// Train/test datasets exactly as train(config) would use them. The test set
/// keeps its stored grid so it can be evaluated at finer resolutions.
std::pair<PdeDataset, PdeDataset> load_split(const TrainConfig& config);

/// Library version and build descriptors recorded in every report.
nlohmann::json version_stamp();
nlohmann::json machine_descriptor();

}  // namespace lnop
