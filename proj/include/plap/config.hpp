#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "plap/grid.hpp"
#include "plap/solver.hpp"

namespace plap {

/// Raised for malformed or inconsistent configuration; the message names the
/// offending section/key.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// [problem]: rectangle, grid list, boundary data, exponents, regularization.
struct ProblemSection {
  Point origin{0.0, 0.0};
  double extent_x1 = 1.0;
  double extent_x2 = 1.0;
  std::vector<int> grids{65};  // nx per refinement level, strictly increasing
  std::string boundary = "affine";
  std::map<std::string, double> boundary_params;  // keys "boundary.<name>"
  double p1 = 2.0;
  double p2 = 2.0;
  double eps = 1e-3;
  double sigma = 0.0;
};

/// [disks]: one center; R is the modulus-experiment radius (data are drawn
/// from the concentric disk of radius 2R, which must lie inside the domain);
/// r_list holds the small probe radii (each < R).
struct DisksSection {
  Point center{0.5, 0.5};
  double R = 0.25;
  std::vector<double> r_list;
};

/// [checks]: which diagnostics cmd_verify runs and their knobs. An empty
/// `enable` list means "all applicable to this configuration".
struct ChecksSection {
  std::vector<std::string> enable;
  double monotonicity_threshold = 0.02;
  std::vector<double> lebesgue_ratios{2.0, 4.0};  // r2/r1
  double lebesgue_slack = -1.0;                   // <0: default 5h/r1
  double spread_limit = 10.0;
  double slope_limit = 0.05;
  double eps_slope_min = 0.8;
  double stability_limit = 0.10;
  double cutoff_inner = -1.0;  // <0: defaults to R
  double cutoff_outer = -1.0;  // <0: defaults to 2R
  double eps_ref = -1.0;       // <0: min(eps_list)/100
  std::string synthetic;       // "", "wiggle", "bump": replace the solve
  std::map<std::string, double> synthetic_params;  // keys "synthetic.<name>"
};

/// [sweep]: parameter lists for cmd_sweep and the eps/sigma aggregate checks.
struct SweepSection {
  std::vector<double> eps_list;
  std::vector<double> sigma_list;
};

/// [output]
struct OutputSection {
  std::string dir = "out";
  bool write_field = true;
  bool write_svg = true;
};

struct ExperimentConfig {
  ProblemSection problem;
  SolverConfig solver;
  bool deterministic = false;  // [solver] deterministic, or --deterministic
  DisksSection disks;
  ChecksSection checks;
  SweepSection sweep;
  OutputSection output;
  int threads = 1;  // CLI --threads; bounds the sweep worker pool
};

/// Parse the flat sectioned key=value format:
///   - '#' or ';' starts a comment (full line or trailing);
///   - section headers are [problem] [solver] [disks] [checks] [sweep]
///     [output];
///   - entries are `key = value` under the current section; lists are
///     comma-separated; booleans accept true/false/yes/no/1/0.
/// Unknown sections or keys raise ConfigError naming them.
ExperimentConfig parse_config(const std::string& text);

/// parse_config over a file's contents; errors are prefixed with the path.
ExperimentConfig load_config(const std::string& path);

/// Cross-field validation (grid list strictly refining, spacing consistency,
/// every referenced disk inside the domain, parameter ranges). parse_config
/// and load_config call this; it is exposed for configs built in code.
void validate_config(const ExperimentConfig& cfg);

/// All check ids cmd_verify knows, in report order.
const std::vector<std::string>& known_check_ids();

/// The checks a config would run: [checks] enable when given (raising
/// ConfigError for ids that cannot run under this configuration, with the
/// reason), otherwise every check applicable to it (e.g. log_modulus_p only
/// when p1 == p2, eps_convergence only with a [sweep] eps_list).
std::vector<std::string> resolve_enabled_checks(const ExperimentConfig& cfg);

}  // namespace plap
