#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "lnop/data/dataset.hpp"

namespace lnop {

enum class PdeFamily { burgers, advection, darcy, navier_stokes, kolmogorov };

std::string to_string(PdeFamily family);
PdeFamily parse_pde_family(const std::string& name);

/// Generator settings. Unset optionals take the family default; resolve()
/// fills them in, and the resolved form is what the dataset sidecar records.
struct GeneratorConfig {
  PdeFamily family = PdeFamily::burgers;
  std::size_t resolution = 64;
  std::size_t count = 8;
  std::uint64_t seed = 0;
  /// Solver grid = refine * resolution.
  std::optional<std::size_t> refine;
  std::optional<double> nu;
  /// Burgers target time / advection shift time.
  std::optional<double> t;
  /// Snapshot spacing: NS (default 1) and Kolmogorov (default 0.5).
  std::optional<double> dt;
  /// NS: conditioning snapshots (input channels) and predicted snapshots.
  std::size_t history = 10;
  std::size_t horizon = 10;
  /// Kolmogorov.
  double reynolds = 100.0;
  int kolmogorov_n = 4;
  double burn_in = 5.0;
  std::size_t pairs_per_trajectory = 10;
  /// Advection parameter ranges (uniform draws per sample).
  double center_min = 0.25, center_max = 0.75;
  double width_min = 0.1, width_max = 0.4;
  double height_min = 0.5, height_max = 1.5;

  GeneratorConfig resolve() const;
  void validate() const;
  nlohmann::json to_json() const;
  static GeneratorConfig from_json(const nlohmann::json& j);
};

/// Stream-splitting seed for sample `index` of a run seeded with `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

/// Generates the dataset, spreading samples over `threads` workers. Output
/// is independent of the thread count. Every sample is checked for finite
/// values and its family's physical invariants (energy decay for Burgers,
/// u >= 0 for Darcy); a violation throws SolverError.
PdeDataset generate_dataset(const GeneratorConfig& config, unsigned threads = 1);

}  // namespace lnop
