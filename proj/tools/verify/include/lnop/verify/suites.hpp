#pragma once

#include <string>
#include <vector>

namespace lnop::verify {

struct SuiteResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct SuiteOptions {
  /// Swap in a contraction whose backward rule is deliberately wrong; the
  /// gradient suite must then fail.
  bool negative_control = false;
  unsigned instances = 50;
};

/// Suite names in run order.
const std::vector<std::string>& suite_names();

SuiteResult run_suite(const std::string& name, const SuiteOptions& options = {});
std::vector<SuiteResult> run_all(const SuiteOptions& options = {});

// Individual suites, also used directly by the acceptance checks.
SuiteResult contraction_suite(const SuiteOptions& options);
SuiteResult transform_suite(const SuiteOptions& options);
SuiteResult dft_suite(const SuiteOptions& options);
SuiteResult gradient_suite(const SuiteOptions& options);
SuiteResult optimizer_suite(const SuiteOptions& options);
SuiteResult solver_suite(const SuiteOptions& options);

// Solver refinement checks, reported as measured discrepancies.
double burgers_richardson_discrepancy();
double darcy_refinement_discrepancy();
double darcy_symmetry_defect();
double vorticity_mode_decay_error();
double advection_shift_error();
bool burgers_energy_monotone();
bool vorticity_enstrophy_monotone();

}  // namespace lnop::verify
