#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lnop/blocks/param_count.hpp"
#include "lnop/blocks/transform_block.hpp"
#include "lnop/tensor/tensor.hpp"

namespace lnop {

enum class LossKind { relative_l2, mse };

std::string to_string(LossKind loss);
LossKind parse_loss_kind(const std::string& name);

struct TrainConfig {
  struct Data {
    std::string train;  ///< dataset path
    /// Separate test dataset; when empty the last n_test samples of `train`
    /// are held out.
    std::string test;
    std::size_t n_train = 0;  ///< 0: every sample not held out
    std::size_t n_test = 0;   ///< 0 with a separate test file: all of it
    /// Spatial extent of the training grid; 0 keeps the dataset's.
    std::size_t resolution = 0;
    /// Spatial extents to evaluate at; empty means the training resolution.
    std::vector<std::size_t> eval_resolutions;
  } data;

  struct Model {
    Architecture arch = Architecture::learnable;
    std::size_t width = 16;
    /// Per-axis k_i; a single entry applies to every axis.
    Shape modes{16};
    std::size_t blocks = 4;
    bool positional_encoding = true;
    MixInit mix_init = MixInit::random;
  } model;

  struct Optim {
    std::size_t epochs = 100;
    /// 0 picks 20 for 1-D/2-D grids and 10 for 3-D.
    std::size_t batch_size = 0;
    double lr = 1e-3;
    std::size_t schedule_period = 100;
    double schedule_factor = 0.5;
    LossKind loss = LossKind::relative_l2;
    /// Evaluate the test set every this many epochs (and always at the end).
    std::size_t eval_every = 1;
  } optim;

  std::uint64_t seed = 0;

  struct Output {
    std::string dir;  ///< empty: nothing written
    bool checkpoint = true;
  } output;

  void validate() const;
  nlohmann::json to_json() const;
  /// Strict: unknown keys are rejected with their dot path.
  static TrainConfig from_json(const nlohmann::json& j);
};

/// Batch size after resolving the 0 = automatic default for a grid rank.
std::size_t effective_batch_size(const TrainConfig& config, std::size_t grid_rank);

/// Sets `key.path=value` inside `j`. The value is parsed as JSON when it is
/// valid JSON, otherwise taken as a string. The path must already exist.
void apply_override(nlohmann::json& j, const std::string& assignment);

/// Recursively overlays `patch` onto `base`, rejecting keys absent in base.
void merge_strict(nlohmann::json& base, const nlohmann::json& patch, const std::string& path = "");

/// defaults <- file (if any) <- overrides, then parsed and validated.
TrainConfig load_train_config(const std::optional<std::filesystem::path>& file,
                              const std::vector<std::string>& overrides);

}  // namespace lnop
