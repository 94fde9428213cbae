#include "plap/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "json.hpp"
#include "plap/kernels.hpp"

namespace plap {
namespace {

void validate(const SolverConfig& cfg) {
  if (!(cfg.tol > 0.0))
    throw std::invalid_argument("solver: tol must be > 0");
  if (cfg.max_iters < 1)
    throw std::invalid_argument("solver: max_iters must be >= 1");
  if (!(cfg.ls_beta > 0.0 && cfg.ls_beta < 1.0))
    throw std::invalid_argument("solver: line-search beta must be in (0,1)");
  if (!(cfg.ls_c > 0.0 && cfg.ls_c < 1.0))
    throw std::invalid_argument("solver: line-search c must be in (0,1)");
  if (!(cfg.cg_tol > 0.0) || cfg.cg_max_iters < 1)
    throw std::invalid_argument("solver: bad inner linear-solve settings");
  const auto& c = cfg.continuation;
  for (std::size_t i = 0; i + 1 < c.size(); ++i)
    if (!(c[i + 1] < c[i]))
      throw std::invalid_argument(
          "solver: continuation must be strictly decreasing");
  if (!c.empty() && !(c.back() >= 0.0))
    throw std::invalid_argument("solver: continuation entries must be >= 0");
}

// Stages: continuation entries above the target eps, then the target itself.
std::vector<double> stage_ladder(const std::vector<double>& cont,
                                 double target) {
  std::vector<double> out;
  for (double e : cont)
    if (e > target) out.push_back(e);
  out.push_back(target);
  return out;
}

struct Workspace {
  // cell-sized
  std::vector<double> g1, g2, f1, f2, c1, c2;
  // node-sized
  std::vector<double> r, b, d, diag, inv_diag, cg_r, cg_z, cg_p, cg_ap,
      u_trial;
};

double energy_of(const Grid& g, const std::vector<double>& u,
                 const ExponentPair& e, double eps, double sigma,
                 Workspace& w) {
  const auto& k = kernels::ops();
  const std::size_t nc = g.cell_count();
  w.g1.resize(nc);
  w.g2.resize(nc);
  k.cell_gradient(u.data(), g.nx(), g.ny(), 1.0 / (2.0 * g.h()), w.g1.data(),
                  w.g2.data());
  return k.energy_sum(w.g1.data(), w.g2.data(), nc, e.p1, e.p2, eps, sigma) *
         g.h() * g.h();
}

// Fills w.r (and w.g1/w.g2 with the gradient of u); returns max|r|/h^2.
double residual_of(const Grid& g, const std::vector<double>& u,
                   const ExponentPair& e, double eps, double sigma,
                   Workspace& w) {
  const auto& k = kernels::ops();
  const std::size_t nc = g.cell_count();
  w.g1.resize(nc);
  w.g2.resize(nc);
  w.f1.resize(nc);
  w.f2.resize(nc);
  k.cell_gradient(u.data(), g.nx(), g.ny(), 1.0 / (2.0 * g.h()), w.g1.data(),
                  w.g2.data());
  k.flux(w.g1.data(), w.g2.data(), nc, e.p1, e.p2, eps, sigma, w.f1.data(),
         w.f2.data());
  w.r.assign(g.node_count(), 0.0);
  k.scatter_edge(w.f1.data(), w.f2.data(), g.nx(), g.ny(), 0.5 * g.h(),
                 w.r.data());
  zero_boundary(g, &w.r);
  return k.max_abs(w.r.data(), w.r.size()) / (g.h() * g.h());
}

struct CgOutcome {
  int iters = 0;
  bool breakdown = false;
};

// Jacobi-preconditioned CG on H x = b (boundary rows are identity/zero).
CgOutcome pcg(const Grid& g, const std::vector<double>& c1,
              const std::vector<double>& c2, const std::vector<double>& b,
              double rtol, int maxit, std::vector<double>* x, Workspace& w) {
  const auto& k = kernels::ops();
  const std::size_t n = b.size();
  x->assign(n, 0.0);
  const double b2 = k.dot(b.data(), b.data(), n);
  if (b2 == 0.0) return {};
  w.cg_r = b;
  w.cg_z.resize(n);
  k.mul(w.cg_r.data(), w.inv_diag.data(), w.cg_z.data(), n);
  w.cg_p = w.cg_z;
  double rz = k.dot(w.cg_r.data(), w.cg_z.data(), n);
  const double target2 = rtol * rtol * b2;
  for (int it = 1; it <= maxit; ++it) {
    hessian_apply(g, c1, c2, w.cg_p, &w.cg_ap, &w.f1, &w.f2);
    const double pap = k.dot(w.cg_p.data(), w.cg_ap.data(), n);
    if (!(pap > 0.0) || !std::isfinite(pap)) return {it - 1, true};
    const double alpha = rz / pap;
    k.axpy(alpha, w.cg_p.data(), x->data(), n);
    k.axpy(-alpha, w.cg_ap.data(), w.cg_r.data(), n);
    if (k.dot(w.cg_r.data(), w.cg_r.data(), n) <= target2) return {it, false};
    k.mul(w.cg_r.data(), w.inv_diag.data(), w.cg_z.data(), n);
    const double rz_new = k.dot(w.cg_r.data(), w.cg_z.data(), n);
    if (!(rz_new > 0.0) || !std::isfinite(rz_new)) return {it, true};
    k.xpby(w.cg_z.data(), rz_new / rz, w.cg_p.data(), n);
    rz = rz_new;
  }
  return {maxit, false};  // truncated; still a usable descent direction
}

StageReport run_stage(const Grid& g, std::vector<double>& u,
                      const ExponentPair& e, double eps, double sigma,
                      const SolverConfig& cfg, Workspace& w) {
  const auto& k = kernels::ops();
  const std::size_t n = g.node_count();
  StageReport st;
  st.eps = eps;

  double energy = energy_of(g, u, e, eps, sigma, w);
  st.energy_history.push_back(energy);
  double rnorm = residual_of(g, u, e, eps, sigma, w);
  int it = 0;
  bool stalled = false;
  while (rnorm > cfg.tol && it < cfg.max_iters && !stalled) {
    // Newton direction at the current gradient (left in w.g1/w.g2).
    w.c1.resize(g.cell_count());
    w.c2.resize(g.cell_count());
    k.flux_deriv(w.g1.data(), w.g2.data(), g.cell_count(), e.p1, e.p2, eps,
                 sigma, w.c1.data(), w.c2.data());
    w.diag = hessian_diag(g, w.c1, w.c2);
    w.inv_diag.resize(n);
    for (std::size_t m = 0; m < n; ++m) w.inv_diag[m] = 1.0 / w.diag[m];
    w.b.assign(n, 0.0);
    k.axpy(-1.0, w.r.data(), w.b.data(), n);
    const CgOutcome cg =
        pcg(g, w.c1, w.c2, w.b, cfg.cg_tol, cfg.cg_max_iters, &w.d, w);
    st.cg_iterations += cg.iters;

    double gd = k.dot(w.r.data(), w.d.data(), n);
    if (!(gd < 0.0) || !std::isfinite(gd)) {
      // CG gave nothing usable (degenerate Hessian at eps=0, or breakdown):
      // take a preconditioned gradient step instead.
      st.used_fallback = true;
      for (std::size_t m = 0; m < n; ++m)
        w.d[m] = -w.r[m] * w.inv_diag[m];
      gd = k.dot(w.r.data(), w.d.data(), n);
      if (!(gd < 0.0)) break;  // r == 0 up to rounding; nothing to do
    }

    // Armijo backtracking on the energy. Near the minimum the predicted
    // decrease c*t*gd drops below the resolution of the energy sum and the
    // sufficient-decrease test stops carrying information; in that regime a
    // step is judged by the first-order optimality measure instead (accept
    // iff it strictly reduces max|r|, allowing the energy to wobble by one
    // rounding unit).
    const double energy_floor = 2.0 * std::numeric_limits<double>::epsilon() *
                                std::max(1.0, std::fabs(energy));
    double t = 1.0;
    bool accepted = false;
    double trial_energy = energy;
    while (t >= 1e-14) {
      w.u_trial = u;
      k.axpy(t, w.d.data(), w.u_trial.data(), n);
      trial_energy = energy_of(g, w.u_trial, e, eps, sigma, w);
      const double predicted = cfg.ls_c * t * gd;
      if (-predicted > energy_floor) {
        if (trial_energy <= energy + predicted) {
          accepted = true;
          break;
        }
      } else {
        const double trial_rnorm = residual_of(g, w.u_trial, e, eps, sigma, w);
        if (trial_rnorm < rnorm && trial_energy <= energy + energy_floor) {
          accepted = true;
          break;
        }
      }
      t *= cfg.ls_beta;
    }
    if (!accepted) {
      stalled = true;  // at the numerical floor of the energy
      break;
    }
    u.swap(w.u_trial);
    energy = trial_energy;
    st.energy_history.push_back(energy);
    ++it;
    rnorm = residual_of(g, u, e, eps, sigma, w);
  }

  st.iterations = it;
  st.final_residual_norm = rnorm;
  st.final_energy = energy;
  st.converged = rnorm <= cfg.tol;
  return st;
}

}  // namespace

std::vector<double> SolverConfig::default_continuation() {
  return {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8};
}

ScalarField transfinite_init(const Grid& g, const BoundaryFn& boundary) {
  const int nx = g.nx(), ny = g.ny();
  std::vector<double> bottom(nx), top(nx), left(ny), right(ny);
  for (int i = 0; i < nx; ++i) {
    bottom[i] = boundary(g.node(i, 0));
    top[i] = boundary(g.node(i, ny - 1));
  }
  for (int j = 0; j < ny; ++j) {
    left[j] = boundary(g.node(0, j));
    right[j] = boundary(g.node(nx - 1, j));
  }
  const double c00 = bottom[0], c10 = bottom[nx - 1];
  const double c01 = top[0], c11 = top[nx - 1];
  ScalarField u(g);
  for (int j = 0; j < ny; ++j) {
    const double t = static_cast<double>(j) / (ny - 1);
    for (int i = 0; i < nx; ++i) {
      const double s = static_cast<double>(i) / (nx - 1);
      u.at(i, j) = (1.0 - s) * left[j] + s * right[j] + (1.0 - t) * bottom[i] +
                   t * top[i] -
                   ((1.0 - s) * (1.0 - t) * c00 + s * (1.0 - t) * c10 +
                    (1.0 - s) * t * c01 + s * t * c11);
    }
  }
  return u;
}

std::pair<ScalarField, SolveReport> solve_dirichlet(
    const Grid& g, const BoundaryFn& boundary, const ExponentPair& exps,
    const RegularizationParams& reg, const SolverConfig& cfg) {
  validate(cfg);
  ScalarField init = transfinite_init(g, boundary);
  std::vector<double> u = init.values();
  if (cfg.random_init) {
    double lo = init.at(0, 0), hi = lo;
    for (int i = 0; i < g.nx(); ++i) {
      for (int j : {0, g.ny() - 1}) {
        lo = std::min(lo, init.at(i, j));
        hi = std::max(hi, init.at(i, j));
      }
    }
    for (int j = 0; j < g.ny(); ++j) {
      for (int i : {0, g.nx() - 1}) {
        lo = std::min(lo, init.at(i, j));
        hi = std::max(hi, init.at(i, j));
      }
    }
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> dist(lo, hi);
    for (int j = 1; j < g.ny() - 1; ++j)
      for (int i = 1; i < g.nx() - 1; ++i) u[g.node_index(i, j)] = dist(rng);
  }

  Workspace w;
  SolveReport rep;
  for (double eps : stage_ladder(cfg.continuation, reg.eps)) {
    StageReport st = run_stage(g, u, exps, eps, reg.sigma, cfg, w);
    rep.used_fallback = rep.used_fallback || st.used_fallback;
    rep.stages.push_back(std::move(st));
  }
  const StageReport& last = rep.stages.back();
  rep.converged = last.converged;
  rep.final_residual_norm = last.final_residual_norm;
  rep.final_energy = last.final_energy;
  return {ScalarField(g, std::move(u)), rep};
}

std::string solve_report_json(const SolveReport& r) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["converged"] = r.converged;
  j["used_fallback"] = r.used_fallback;
  j["final_residual_norm"] = r.final_residual_norm;
  j["final_energy"] = r.final_energy;
  j["stages"] = nlohmann::json::array();
  for (const StageReport& s : r.stages) {
    nlohmann::json js;
    js["eps"] = s.eps;
    js["iterations"] = s.iterations;
    js["cg_iterations"] = s.cg_iterations;
    js["final_residual_norm"] = s.final_residual_norm;
    js["final_energy"] = s.final_energy;
    js["converged"] = s.converged;
    js["used_fallback"] = s.used_fallback;
    js["energy_history"] = s.energy_history;
    j["stages"].push_back(std::move(js));
  }
  return j.dump(2);
}

double SeparableSolution::value(Point q) const {
  return A * std::pow(std::fabs(q.x1), a) - B * std::pow(std::fabs(q.x2), b);
}

double SeparableSolution::d1(Point q) const {
  if (q.x1 == 0.0) return 0.0;
  return std::copysign(A * a * std::pow(std::fabs(q.x1), a - 1.0), q.x1);
}

double SeparableSolution::d2(Point q) const {
  if (q.x2 == 0.0) return 0.0;
  return -std::copysign(B * b * std::pow(std::fabs(q.x2), b - 1.0), q.x2);
}

SeparableSolution build_separable_solution(const ExponentPair& exps,
                                           double A) {
  if (!(A > 0.0))
    throw std::invalid_argument("separable solution: need A > 0");
  SeparableSolution s;
  s.A = A;
  s.a = exps.p1 / (exps.p1 - 1.0);
  s.b = exps.p2 / (exps.p2 - 1.0);
  // Flux balance: (A*a)^{p1-1} = (B*b)^{p2-1}.
  s.B = std::pow(A * s.a, (exps.p1 - 1.0) / (exps.p2 - 1.0)) / s.b;
  return s;
}

std::vector<EpsConvergenceRow> epsilon_convergence_study(
    const Grid& g, const BoundaryFn& boundary, const ExponentPair& exps,
    const std::vector<double>& eps_list, const SolverConfig& cfg, double sigma,
    double eps_ref) {
  if (eps_list.empty())
    throw std::invalid_argument("eps study: eps_list must be nonempty");
  for (std::size_t i = 0; i + 1 < eps_list.size(); ++i)
    if (!(eps_list[i + 1] < eps_list[i]))
      throw std::invalid_argument(
          "eps study: eps_list must be strictly decreasing");
  if (!(eps_list.back() > 0.0))
    throw std::invalid_argument("eps study: eps values must be positive");
  if (eps_ref < 0.0) eps_ref = eps_list.back() / 100.0;
  if (!(eps_ref < eps_list.back()))
    throw std::invalid_argument(
        "eps study: reference eps must be below min(eps_list)");

  const auto& k = kernels::ops();
  const std::size_t nc = g.cell_count();
  const double h2 = g.h() * g.h();

  auto solve_at = [&](double eps) {
    auto [u, rep] =
        solve_dirichlet(g, boundary, exps, RegularizationParams(eps, sigma),
                        cfg);
    if (!rep.converged)
      throw std::runtime_error(
          "eps study: solve did not converge at eps=" + std::to_string(eps));
    return u;
  };

  const ScalarField u_ref = solve_at(eps_ref);
  const CellGradientField gref = discrete_gradient(u_ref);
  const double grad_sq =
      h2 * (k.dot(gref.g1.values().data(), gref.g1.values().data(), nc) +
            k.dot(gref.g2.values().data(), gref.g2.values().data(), nc));

  std::vector<EpsConvergenceRow> rows;
  std::vector<double> diff(nc), powed(nc);
  for (double eps : eps_list) {
    const ScalarField u_e = solve_at(eps);
    const CellGradientField ge = discrete_gradient(u_e);
    double lhs = 0.0;
    const double pexp[2] = {exps.p1, exps.p2};
    const std::vector<double>* a[2] = {&ge.g1.values(), &ge.g2.values()};
    const std::vector<double>* b[2] = {&gref.g1.values(), &gref.g2.values()};
    for (int axis = 0; axis < 2; ++axis) {
      for (std::size_t m = 0; m < nc; ++m)
        diff[m] = (*a[axis])[m] - (*b[axis])[m];
      k.abs_pow(diff.data(), nc, pexp[axis], powed.data());
      lhs += std::exp2(2.0 - pexp[axis]) * h2 * k.sum(powed.data(), nc);
    }
    EpsConvergenceRow row;
    row.eps = eps;
    row.lhs = lhs;
    row.rhs = 0.5 * eps * (exps.p2 - 1.0) * grad_sq;
    row.ratio = row.rhs > 0.0 ? row.lhs / row.rhs : 0.0;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace plap
