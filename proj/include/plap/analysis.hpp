#pragma once

#include <string>
#include <vector>

#include "plap/energy.hpp"
#include "plap/grid.hpp"
#include "plap/solver.hpp"

namespace plap {

/// Radial C^2 cutoff: 1 on the inner disk, 0 outside the outer disk, quintic
/// polynomial profile in between (1 - (10s^3 - 15s^4 + 6s^5)). The steepest
/// slope of the profile is 1.875/(r_outer - r_inner), recorded as the
/// Lipschitz bound. Carries nodal samples plus the analytic value/gradient
/// used by the integral checks.
class CutoffField {
 public:
  CutoffField(const Grid& g, Point center, double r_inner, double r_outer);

  const ScalarField& nodal() const { return nodal_; }
  const Grid& grid() const { return nodal_.grid(); }
  Point center() const { return center_; }
  double r_inner() const { return r_in_; }
  double r_outer() const { return r_out_; }
  double lipschitz_bound() const { return 1.875 / (r_out_ - r_in_); }

  double value(Point q) const;
  void gradient(Point q, double* d1, double* d2) const;

 private:
  ScalarField nodal_;
  Point center_;
  double r_in_ = 0.0, r_out_ = 0.0;
};

CutoffField make_cutoff(const Grid& g, Point center, double r_inner,
                        double r_outer);

/// Location/parameter tuple attached to every check result.
struct CheckParams {
  double r = 0.0;
  double R = 0.0;
  Point center{};
  double p1 = 0.0, p2 = 0.0;
  double eps = 0.0, sigma = 0.0;
  double h = 0.0;
  int axis = 0;  // 0 = not axis-specific
};

/// One named inequality check. pass means ratio <= 1 + slack, where
/// ratio = lhs/rhs when rhs > 0, 0 when lhs = rhs = 0, and +inf otherwise.
struct DiagnosticReport {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  double slack = 0.0;
  bool pass = false;
  CheckParams params;
  std::string note;
};

DiagnosticReport make_report(std::string name, double lhs, double rhs,
                             double slack, CheckParams params,
                             std::string note = "");

enum class OscMode { boundary, full };

/// max - min of interpolated samples. Boundary mode samples the circle of
/// radius d.r at m = max(64, ceil(8*2*pi*r/h)) equispaced angles (rounded up
/// to even so both axis extremes are hit); full mode adds every cell center
/// inside the closed disk. Works for nodal and cell fields.
double oscillation_on_disk(const ScalarField& f, const DiskSpec& d,
                           OscMode mode);
double oscillation_on_disk(const CellField& f, const DiskSpec& d,
                           OscMode mode);

/// Interior-vs-boundary extremum violation of a derivative component over a
/// family of disks:
///   violation(d) = max(0, interior max - boundary max)
///                + max(0, boundary min - interior min).
/// lhs = worst violation, rhs = rel_threshold * (global oscillation of the
/// field), pass = lhs <= rhs. id: deriv_max_principle.
DiagnosticReport monotonicity_check(const CellField& deriv,
                                    const std::vector<DiskSpec>& disks,
                                    double rel_threshold = 0.02);

/// Oscillation inequality on concentric disks r1 < r2:
///   lhs = osc_{B_r1}(v)^2 * log(r2/r1),  rhs = pi * integral_{B_r2}|grad v|^2.
/// slack < 0 selects the default 5*h/r1. A cell-field input is averaged to
/// nodes first (recorded in the note). id: osc_lebesgue.
DiagnosticReport lebesgue_check(const ScalarField& v, Point center, double r1,
                                double r2, double slack = -1.0);
DiagnosticReport lebesgue_check(const CellField& v, Point center, double r1,
                                double r2, double slack = -1.0);

/// Gradient component pushed through t -> sgn(t)|t|^{p/2} (the transformed
/// fields whose oscillation the log-modulus arguments control).
CellField transformed_gradient_component(const CellGradientField& gf, int axis,
                                         double p);

/// Single-exponent log-modulus experiment (requires p1 == p2 == p): for each
/// r in r_list, ratio = A(r) =
///   osc_{B_r}(grad u) / (R^{-2} log(R/r)^{-1} integral_{B_2R}|grad u|^p)^{1/p}
/// with osc over components. Rows carry A(r) in `ratio`; judge the family
/// with modulus_boundedness. id: log_modulus_p.
std::vector<DiagnosticReport> log_modulus_experiment(
    const ScalarField& u, const ExponentPair& exps, Point center, double R,
    const std::vector<double>& r_list);

/// Per-component anisotropic variant: for each r and axis i,
///   A_i(r) = osc_{B_r}(u_{x_i}) /
///            (R^{-2} log(R/r)^{-1} integral_{B_2R}(|grad u|^{p1}+|grad u|^{p2}))^{1/p_i}.
/// id: log_modulus_aniso (params.axis set per row).
std::vector<DiagnosticReport> log_modulus_experiment_aniso(
    const ScalarField& u, const ExponentPair& exps, Point center, double R,
    const std::vector<double>& r_list);

/// Boundedness judgment over a family of A(r) rows: lhs = max A, rhs =
/// spread_limit * min A, and the per-step normalized trend slope of A vs row
/// index must stay below slope_limit. pass = both.
DiagnosticReport modulus_boundedness(const std::vector<DiagnosticReport>& rows,
                                     const std::string& name,
                                     double spread_limit = 10.0,
                                     double slope_limit = 0.05);

/// First energy estimate under a cutoff:
///   sum_i II xi^{p2} |u_{x_i}|^{p_i}  <=
///   a_ref sum_i II xi^{p2-p_i} |xi_{x_i}|^{p_i} |u|^{p_i}
///   + eps (p2-1) p2^2 II xi^{p2-2} |grad xi|^2 u^2,
/// a_ref = 2^{p2} p2^{p2}. id: energy_caccioppoli.
DiagnosticReport caccioppoli_first_check(const ScalarField& u,
                                         const ExponentPair& exps, double eps,
                                         const CutoffField& cutoff);

/// Second-derivative estimate (differentiate along axis nu, test with
/// xi^2 u_{x_nu}):
///   sum_i (p_i-1) II xi^2 |u_{x_i}|^{p_i-2} (u_{x_i x_nu})^2  <=
///   4 sum_i (p_i-1) II xi_{x_i}^2 |u_{x_i}|^{p_i-2} (u_{x_nu})^2
///   + 4 eps (p2-1) II |grad xi|^2 (u_{x_nu})^2.
/// Second differences: cell gradient -> node average -> cell gradient.
/// id: deriv_caccioppoli.
DiagnosticReport caccioppoli_second_check(const ScalarField& u,
                                          const ExponentPair& exps, double eps,
                                          const CutoffField& cutoff, int nu);

/// Summed transformed-gradient bound:
///   sum_i II xi^2 |grad T_i|^2  <=
///   C_ref (sum_i II |grad xi|^2 |u_{x_i}|^{p_i-2} |grad u|^2
///          + eps II |grad xi|^2 |grad u|^2),
/// T_i = sgn(u_{x_i})|u_{x_i}|^{p_i/2}, C_ref = 4 max(p1,p2)^2.
/// id: transformed_grad_bound.
DiagnosticReport transformed_grad_bound_check(const ScalarField& u,
                                 const ExponentPair& exps, double eps,
                                 const CutoffField& cutoff);

/// Higher-integrability monitor (p1 < p2), concentric disks r < R:
///   lhs = II_{B_r} |u_{x1}|^{p2},
///   rhs = II_{B_R} (1 + |u_{x1}|^{p1} + |u_{x2}|^{p2}).
/// A single call only measures (pass = true, always); use
/// integrability_stability across refinements/eps to judge boundedness.
/// id: p2_integrability.
DiagnosticReport integrability_monitor(const ScalarField& u,
                                       const ExponentPair& exps, Point center,
                                       double r, double R);

/// lhs = worst relative change of the monitored integral between consecutive
/// rows, rhs = rel_limit; pass = lhs <= rhs.
DiagnosticReport integrability_stability(
    const std::vector<DiagnosticReport>& monitors, double rel_limit = 0.10);

struct SigmaComparisonRow {
  double sigma = 0.0;
  double energy_min = 0.0;      // I^{eps,sigma} at its own minimizer
  double energy_at_ueps = 0.0;  // I^{eps,sigma} evaluated at the sigma=0 run
  double max_gap = 0.0;         // max-norm distance between the two fields
  bool minimality = false;      // energy_min <= energy_at_ueps (+ rounding)
};

/// Solve at each sigma (decreasing, >= 0) with fixed eps; compare against the
/// sigma = 0 solution.
std::vector<SigmaComparisonRow> sigma_comparison(
    const Grid& g, const BoundaryFn& boundary, const ExponentPair& exps,
    double eps, const std::vector<double>& sigma_list,
    const SolverConfig& cfg);

/// Aggregate: every row minimal, gaps nonincreasing down the sigma ladder.
/// lhs = last gap, rhs = first gap. id: sigma_limit. `base` supplies the
/// problem context (exponents, eps, h) for the report row.
DiagnosticReport sigma_limit_report(const std::vector<SigmaComparisonRow>& rows,
                                    CheckParams base = {});

/// Aggregate over an eps-convergence table: pass iff every ratio <= 1 and the
/// log-log slope of lhs vs eps is at least slope_min (rows with lhs = 0 are
/// exempt from the slope fit; an all-zero table passes). id: eps_convergence.
DiagnosticReport eps_convergence_report(
    const std::vector<EpsConvergenceRow>& rows, double slope_min = 0.8,
    CheckParams base = {});

}  // namespace plap
