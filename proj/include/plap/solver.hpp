#pragma once

#include <functional>
#include <string>
#include <vector>

#include "plap/energy.hpp"
#include "plap/grid.hpp"

namespace plap {

using BoundaryFn = std::function<double(Point)>;

struct SolverConfig {
  /// Convergence threshold on max|residual|/h^2 (grid-independent scale).
  double tol = 1e-9;
  /// Newton iterations allowed per continuation stage.
  int max_iters = 50;
  /// Strictly decreasing eps ladder; entries larger than the target eps are
  /// solved first (warm-started), then the target itself. Empty = direct.
  std::vector<double> continuation = default_continuation();
  /// Backtracking line search: step shrink factor and sufficient-decrease
  /// constant, both in (0,1).
  double ls_beta = 0.5;
  double ls_c = 1e-4;
  /// Seed for the optional randomized interior initialization.
  unsigned long long seed = 0;
  /// Start from uniform-random interior values instead of the transfinite
  /// blend of the boundary data (used by uniqueness tests).
  bool random_init = false;
  /// Inner linear solve (Jacobi-preconditioned CG): relative residual target
  /// and iteration cap.
  double cg_tol = 1e-6;
  int cg_max_iters = 2000;

  static std::vector<double> default_continuation();
};

struct StageReport {
  double eps = 0.0;
  int iterations = 0;
  int cg_iterations = 0;
  double final_residual_norm = 0.0;
  double final_energy = 0.0;
  bool converged = false;
  /// True when a Newton direction was unusable (CG breakdown / non-descent)
  /// and a preconditioned gradient step was taken instead.
  bool used_fallback = false;
  /// Energy at the start of the stage and after each accepted step;
  /// nonincreasing up to one rounding unit (steps taken at the numerical
  /// floor of the energy are accepted on residual decrease instead).
  std::vector<double> energy_history;
};

struct SolveReport {
  std::vector<StageReport> stages;
  bool converged = false;
  bool used_fallback = false;
  double final_residual_norm = 0.0;
  double final_energy = 0.0;
};

std::string solve_report_json(const SolveReport& r);

/// Evaluate the boundary function on the boundary ring; interior nodes get
/// the transfinite (Coons) blend of the four edges. Affine data reproduces
/// the affine function exactly.
ScalarField transfinite_init(const Grid& g, const BoundaryFn& boundary);

/// Minimize the regularized energy over interior nodal values with the given
/// Dirichlet data, by damped Newton with Armijo backtracking and
/// eps-continuation down to reg.eps (sigma held fixed). Throws
/// std::invalid_argument for bad configs; solver failure is reported via
/// SolveReport::converged, not an exception.
std::pair<ScalarField, SolveReport> solve_dirichlet(
    const Grid& g, const BoundaryFn& boundary, const ExponentPair& exps,
    const RegularizationParams& reg, const SolverConfig& cfg);

/// Closed-form separable solution of the unregularized equation:
///   u(x) = A|x1|^a - B|x2|^b,  a = p1/(p1-1), b = p2/(p2-1),
/// with B chosen so both flux divergences are +-(A*a)^{p1-1}:
///   (A*a)^{p1-1} = (B*b)^{p2-1}.
struct SeparableSolution {
  double A = 0.0, B = 0.0, a = 0.0, b = 0.0;
  double value(Point q) const;
  double d1(Point q) const;  // partial along x1
  double d2(Point q) const;  // partial along x2
};

SeparableSolution build_separable_solution(const ExponentPair& exps, double A);

/// One row of the eps-convergence table: solutions u^eps vs the reference
/// solution at eps_ref, measured by
///   lhs = sum_i 2^{2-p_i} * h^2 sum_cells |u^eps_{x_i} - u^ref_{x_i}|^{p_i}
///   rhs = (eps/2)(p2-1) * h^2 sum_cells |grad u^ref|^2.
struct EpsConvergenceRow {
  double eps = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
};

/// eps_list must be strictly decreasing and positive. eps_ref < 0 selects the
/// default min(eps_list)/100.
std::vector<EpsConvergenceRow> epsilon_convergence_study(
    const Grid& g, const BoundaryFn& boundary, const ExponentPair& exps,
    const std::vector<double>& eps_list, const SolverConfig& cfg,
    double sigma = 0.0, double eps_ref = -1.0);

}  // namespace plap
