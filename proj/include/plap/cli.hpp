#pragma once

#include "plap/config.hpp"

namespace plap {

/// Process exit codes shared by the library commands and the binary.
enum ExitCode : int {
  exit_ok = 0,
  exit_check_failure = 1,
  exit_config_error = 2,
  exit_solver_failure = 3,
};

/// Solve on every configured grid; write one solution CSV and one solve
/// report JSON per grid. With `separable` boundary data, also emit a
/// refinement table (error vs spacing) against the closed-form solution.
int cmd_solve(const ExperimentConfig& cfg);

/// Run the enabled diagnostic checks on the configured problem (solving, or
/// sampling the synthetic field when one is configured) and write the
/// diagnostics CSV/JSON. Exit 0 iff every enabled check passes its slack.
int cmd_verify(const ExperimentConfig& cfg);

/// Grid x eps sweep: each point solves and measures (oscillations, modulus
/// ratios, per-field checks) as an independent job on a bounded worker pool
/// with atomically written per-job CSVs; the merged long-format table, the
/// aggregate eps/sigma checks, and the SVG plots are produced single-threaded
/// afterwards.
int cmd_sweep(const ExperimentConfig& cfg);

}  // namespace plap
