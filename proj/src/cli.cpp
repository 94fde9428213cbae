#include "plap/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "plap/analysis.hpp"
#include "plap/boundary_data.hpp"
#include "plap/kernels.hpp"
#include "plap/report_io.hpp"
#include "plap/svg.hpp"

namespace plap {
namespace {

/// Thrown when a solve that a command depends on does not converge; mapped to
/// exit_solver_failure.
struct SolverFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

Grid grid_for(const ProblemSection& p, int nx) {
  const double h = p.extent_x1 / (nx - 1);
  const int ny = static_cast<int>(std::llround(p.extent_x2 / h)) + 1;
  return build_grid(p.origin, p.extent_x1, p.extent_x2, nx, ny);
}

void apply_determinism(const ExperimentConfig& cfg) {
  if (cfg.deterministic) kernels::force(kernels::Backend::scalar);
}

int worker_count(const ExperimentConfig& cfg) {
  return cfg.deterministic ? 1 : std::max(1, cfg.threads);
}

std::string out_path(const ExperimentConfig& cfg, const std::string& name) {
  return cfg.output.dir + "/" + name;
}

ScalarField solve_or_throw(const Grid& g, const BoundaryFn& bfn,
                           const ExponentPair& exps,
                           const RegularizationParams& reg,
                           const SolverConfig& sc,
                           SolveReport* rep_out = nullptr) {
  auto [u, rep] = solve_dirichlet(g, bfn, exps, reg, sc);
  if (!rep.converged)
    throw SolverFailure("solver did not converge (nx=" +
                        std::to_string(g.nx()) + ", eps=" +
                        fmt("%g", reg.eps) + ", sigma=" +
                        fmt("%g", reg.sigma) + ")");
  if (rep_out) *rep_out = rep;
  return std::move(u);
}

double effective_cutoff_inner(const ExperimentConfig& cfg) {
  return cfg.checks.cutoff_inner < 0.0 ? cfg.disks.R : cfg.checks.cutoff_inner;
}
double effective_cutoff_outer(const ExperimentConfig& cfg) {
  return cfg.checks.cutoff_outer < 0.0 ? 2.0 * cfg.disks.R
                                       : cfg.checks.cutoff_outer;
}

void stamp(std::vector<DiagnosticReport>* rows, std::size_t first,
           const ExponentPair& exps, double eps, double sigma) {
  for (std::size_t k = first; k < rows->size(); ++k) {
    CheckParams& p = (*rows)[k].params;
    p.p1 = exps.p1;
    p.p2 = exps.p2;
    p.eps = eps;
    p.sigma = sigma;
  }
}

bool has_id(const std::vector<std::string>& ids, const char* id) {
  return std::find(ids.begin(), ids.end(), id) != ids.end();
}

// --- per-field checks -----------------------------------------------------

struct FieldCheckOptions {
  bool lebesgue = false;
  bool monotonicity = false;
  bool cacc_first = false;
  bool cacc_second = false;
  bool grad_bound = false;
  bool modulus = false;       // modulus experiment + boundedness summary
  bool integrability = false; // single monitor row (measurement)
  bool grad_osc = false;      // oscillation-vs-radius measurement rows
};

FieldCheckOptions options_from(const std::vector<std::string>& ids,
                               const ExponentPair& exps) {
  FieldCheckOptions o;
  o.lebesgue = has_id(ids, "osc_lebesgue");
  o.monotonicity = has_id(ids, "deriv_max_principle");
  o.cacc_first = has_id(ids, "energy_caccioppoli");
  o.cacc_second = has_id(ids, "deriv_caccioppoli");
  o.grad_bound = has_id(ids, "transformed_grad_bound");
  o.modulus = exps.p1 == exps.p2 ? has_id(ids, "log_modulus_p")
                                 : has_id(ids, "log_modulus_aniso");
  return o;
}

std::vector<double> radii_descending(const ExperimentConfig& cfg) {
  std::vector<double> r = cfg.disks.r_list;
  std::sort(r.begin(), r.end(), std::greater<double>());
  return r;
}

std::vector<DiagnosticReport> run_field_checks(const ExperimentConfig& cfg,
                                               const ExponentPair& exps,
                                               const ScalarField& u,
                                               double eps,
                                               const FieldCheckOptions& opt) {
  const Grid& g = u.grid();
  const Point center = cfg.disks.center;
  const double R = cfg.disks.R;
  const double sigma = cfg.problem.sigma;
  const std::vector<double> r_desc = radii_descending(cfg);
  const CellGradientField gf = discrete_gradient(u);

  std::vector<DiagnosticReport> rows;
  const auto mark = [&] { return rows.size(); };

  if (opt.lebesgue) {
    const std::size_t first = mark();
    for (int axis = 1; axis <= 2; ++axis) {
      const double p = axis == 1 ? exps.p1 : exps.p2;
      const CellField t = transformed_gradient_component(gf, axis, p);
      for (double r1 : r_desc)
        for (double q : cfg.checks.lebesgue_ratios) {
          DiagnosticReport row =
              lebesgue_check(t, center, r1, q * r1, cfg.checks.lebesgue_slack);
          row.params.axis = axis;
          rows.push_back(std::move(row));
        }
    }
    stamp(&rows, first, exps, eps, sigma);
  }

  if (opt.monotonicity) {
    const std::size_t first = mark();
    std::vector<DiskSpec> disks;
    for (double r : r_desc) disks.push_back({center, r});
    for (int axis = 1; axis <= 2; ++axis) {
      DiagnosticReport row =
          monotonicity_check(axis == 1 ? gf.g1 : gf.g2, disks,
                             cfg.checks.monotonicity_threshold);
      row.params.axis = axis;
      rows.push_back(std::move(row));
    }
    stamp(&rows, first, exps, eps, sigma);
  }

  if (opt.cacc_first || opt.cacc_second || opt.grad_bound) {
    const std::size_t first = mark();
    const CutoffField cutoff = make_cutoff(
        g, center, effective_cutoff_inner(cfg), effective_cutoff_outer(cfg));
    if (opt.cacc_first)
      rows.push_back(caccioppoli_first_check(u, exps, eps, cutoff));
    if (opt.cacc_second) {
      rows.push_back(caccioppoli_second_check(u, exps, eps, cutoff, 1));
      rows.push_back(caccioppoli_second_check(u, exps, eps, cutoff, 2));
    }
    if (opt.grad_bound)
      rows.push_back(transformed_grad_bound_check(u, exps, eps, cutoff));
    stamp(&rows, first, exps, eps, sigma);
  }

  if (opt.modulus) {
    const std::size_t first = mark();
    if (exps.p1 == exps.p2) {
      std::vector<DiagnosticReport> exp_rows =
          log_modulus_experiment(u, exps, center, R, r_desc);
      DiagnosticReport summary =
          modulus_boundedness(exp_rows, "log_modulus_p",
                              cfg.checks.spread_limit, cfg.checks.slope_limit);
      for (auto& row : exp_rows) rows.push_back(std::move(row));
      rows.push_back(std::move(summary));
    } else {
      // Each derivative component carries its own constant, so the bounded-
      // ness of the A_i(r) family is judged per component.
      std::vector<DiagnosticReport> exp_rows =
          log_modulus_experiment_aniso(u, exps, center, R, r_desc);
      std::vector<DiagnosticReport> summaries;
      for (int axis = 1; axis <= 2; ++axis) {
        std::vector<DiagnosticReport> axis_rows;
        for (const auto& row : exp_rows)
          if (row.params.axis == axis) axis_rows.push_back(row);
        DiagnosticReport summary =
            modulus_boundedness(axis_rows, "log_modulus_aniso",
                                cfg.checks.spread_limit, cfg.checks.slope_limit);
        summary.params.axis = axis;
        summaries.push_back(std::move(summary));
      }
      for (auto& row : exp_rows) rows.push_back(std::move(row));
      for (auto& row : summaries) rows.push_back(std::move(row));
    }
    stamp(&rows, first, exps, eps, sigma);
  }

  if (opt.integrability) {
    const std::size_t first = mark();
    rows.push_back(integrability_monitor(u, exps, center, R, 2.0 * R));
    stamp(&rows, first, exps, eps, sigma);
  }

  if (opt.grad_osc) {
    const std::size_t first = mark();
    for (int axis = 1; axis <= 2; ++axis)
      for (double r : r_desc) {
        DiagnosticReport row;
        row.name = "grad_osc";
        row.lhs = oscillation_on_disk(axis == 1 ? gf.g1 : gf.g2, {center, r},
                                      OscMode::full);
        row.pass = true;
        row.note = "measurement";
        row.params.r = r;
        row.params.R = R;
        row.params.center = center;
        row.params.h = g.h();
        row.params.axis = axis;
        rows.push_back(std::move(row));
      }
    stamp(&rows, first, exps, eps, sigma);
  }

  return rows;
}

// --- shared aggregate drivers ----------------------------------------------

void append_eps_convergence(const ExperimentConfig& cfg,
                            const ExponentPair& exps, const Grid& fine,
                            const BoundaryFn& bfn,
                            std::vector<DiagnosticReport>* rows,
                            std::vector<EpsConvergenceRow>* table_out) {
  std::vector<EpsConvergenceRow> table = epsilon_convergence_study(
      fine, bfn, exps, cfg.sweep.eps_list, cfg.solver, cfg.problem.sigma,
      cfg.checks.eps_ref);
  CheckParams base;
  base.p1 = exps.p1;
  base.p2 = exps.p2;
  base.sigma = cfg.problem.sigma;
  base.h = fine.h();
  base.center = cfg.disks.center;
  rows->push_back(
      eps_convergence_report(table, cfg.checks.eps_slope_min, base));
  write_file_atomic(out_path(cfg, "eps_table.csv"), eps_table_csv(table));
  if (table_out) *table_out = std::move(table);
}

void append_sigma_limit(const ExperimentConfig& cfg, const ExponentPair& exps,
                        const Grid& fine, const BoundaryFn& bfn,
                        std::vector<DiagnosticReport>* rows) {
  const std::vector<SigmaComparisonRow> table =
      sigma_comparison(fine, bfn, exps, cfg.problem.eps, cfg.sweep.sigma_list,
                       cfg.solver);
  CheckParams base;
  base.p1 = exps.p1;
  base.p2 = exps.p2;
  base.eps = cfg.problem.eps;
  base.h = fine.h();
  base.center = cfg.disks.center;
  rows->push_back(sigma_limit_report(table, base));
  write_file_atomic(out_path(cfg, "sigma_table.csv"), sigma_table_csv(table));
}

// --- worker pool -------------------------------------------------------

void run_jobs(int threads, std::size_t njobs,
              const std::function<void(std::size_t)>& fn) {
  if (threads <= 1 || njobs <= 1) {
    for (std::size_t k = 0; k < njobs; ++k) fn(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= njobs) return;
      fn(k);
    }
  };
  const std::size_t n =
      std::min<std::size_t>(static_cast<std::size_t>(threads), njobs);
  std::vector<std::thread> pool;
  pool.reserve(n);
  for (std::size_t k = 0; k < n; ++k) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
}

int report_error(const char* cmd, const std::exception& e, int code) {
  std::fprintf(stderr, "plap2d %s: error: %s\n", cmd, e.what());
  return code;
}

}  // namespace

// ---------------------------------------------------------------------------
// solve
// ---------------------------------------------------------------------------

int cmd_solve(const ExperimentConfig& cfg) {
  try {
    apply_determinism(cfg);
    const ProblemSection& p = cfg.problem;
    const ExponentPair exps(p.p1, p.p2);
    const RegularizationParams reg(p.eps, p.sigma);
    const BoundaryFn bfn = make_boundary(p.boundary, p.boundary_params, exps);

    std::vector<MmsRow> mms;
    for (int nx : p.grids) {
      const Grid g = grid_for(p, nx);
      SolveReport rep;
      const ScalarField u = solve_or_throw(g, bfn, exps, reg, cfg.solver,
                                           &rep);
      if (cfg.output.write_field)
        write_file_atomic(out_path(cfg, "field_" + std::to_string(nx) +
                                            ".csv"),
                          field_csv(u));
      write_file_atomic(
          out_path(cfg, "solve_report_" + std::to_string(nx) + ".json"),
          solve_report_json(rep));

      if (p.boundary == "separable") {
        double err = 0.0;
        for (int j = 1; j < g.ny() - 1; ++j)
          for (int i = 1; i < g.nx() - 1; ++i)
            err = std::max(err, std::fabs(u.at(i, j) - bfn(g.node(i, j))));
        MmsRow row;
        row.nx = nx;
        row.h = g.h();
        row.max_interior_error = err;
        if (!mms.empty() && err > 0.0 && mms.back().max_interior_error > 0.0)
          row.rate = std::log(mms.back().max_interior_error / err) /
                     std::log(mms.back().h / row.h);
        mms.push_back(row);
      }
    }
    if (!mms.empty())
      write_file_atomic(out_path(cfg, "mms_table.csv"), mms_table_csv(mms));
    return exit_ok;
  } catch (const ConfigError& e) {
    return report_error("solve", e, exit_config_error);
  } catch (const std::invalid_argument& e) {
    return report_error("solve", e, exit_config_error);
  } catch (const SolverFailure& e) {
    return report_error("solve", e, exit_solver_failure);
  } catch (const std::exception& e) {
    return report_error("solve", e, exit_solver_failure);
  }
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

int cmd_verify(const ExperimentConfig& cfg) {
  try {
    apply_determinism(cfg);
    const ProblemSection& p = cfg.problem;
    const ExponentPair exps(p.p1, p.p2);
    const BoundaryFn bfn = make_boundary(p.boundary, p.boundary_params, exps);
    const std::vector<std::string> enabled = resolve_enabled_checks(cfg);

    std::vector<Grid> grids;
    for (int nx : p.grids) grids.push_back(grid_for(p, nx));
    const Grid& fine = grids.back();

    const auto field_for = [&](const Grid& g) {
      if (!cfg.checks.synthetic.empty())
        return make_synthetic_field(g, cfg.checks.synthetic,
                                    cfg.checks.synthetic_params);
      return solve_or_throw(g, bfn, exps,
                            RegularizationParams(p.eps, p.sigma), cfg.solver);
    };
    const ScalarField u_fine = field_for(fine);

    FieldCheckOptions opt = options_from(enabled, exps);
    const bool integ = has_id(enabled, "p2_integrability");
    opt.integrability = integ && grids.size() == 1;
    std::vector<DiagnosticReport> rows =
        run_field_checks(cfg, exps, u_fine, p.eps, opt);

    if (integ && grids.size() >= 2) {
      std::vector<DiagnosticReport> monitors;
      for (std::size_t k = 0; k + 1 < grids.size(); ++k) {
        const ScalarField u_k = field_for(grids[k]);
        monitors.push_back(integrability_monitor(u_k, exps, cfg.disks.center,
                                                 cfg.disks.R,
                                                 2.0 * cfg.disks.R));
      }
      monitors.push_back(integrability_monitor(
          u_fine, exps, cfg.disks.center, cfg.disks.R, 2.0 * cfg.disks.R));
      DiagnosticReport stability =
          integrability_stability(monitors, cfg.checks.stability_limit);
      const std::size_t first = rows.size();
      for (auto& m : monitors) rows.push_back(std::move(m));
      rows.push_back(std::move(stability));
      stamp(&rows, first, exps, p.eps, p.sigma);
    }

    if (has_id(enabled, "eps_convergence"))
      append_eps_convergence(cfg, exps, fine, bfn, &rows, nullptr);
    if (has_id(enabled, "sigma_limit"))
      append_sigma_limit(cfg, exps, fine, bfn, &rows);

    if (cfg.output.write_field)
      write_file_atomic(
          out_path(cfg, "field_" + std::to_string(fine.nx()) + ".csv"),
          field_csv(u_fine));
    write_file_atomic(out_path(cfg, "verify_report.csv"),
                      diagnostics_csv(rows));
    write_file_atomic(out_path(cfg, "verify_report.json"),
                      diagnostics_json(rows));
    return all_pass(rows) ? exit_ok : exit_check_failure;
  } catch (const ConfigError& e) {
    return report_error("verify", e, exit_config_error);
  } catch (const std::invalid_argument& e) {
    return report_error("verify", e, exit_config_error);
  } catch (const SolverFailure& e) {
    return report_error("verify", e, exit_solver_failure);
  } catch (const std::exception& e) {
    return report_error("verify", e, exit_solver_failure);
  }
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

int cmd_sweep(const ExperimentConfig& cfg) {
  try {
    apply_determinism(cfg);
    const ProblemSection& p = cfg.problem;
    const ExponentPair exps(p.p1, p.p2);
    const BoundaryFn bfn = make_boundary(p.boundary, p.boundary_params, exps);
    const std::vector<std::string> enabled = resolve_enabled_checks(cfg);
    if (!cfg.checks.synthetic.empty())
      throw ConfigError(
          "[checks] synthetic: sweeps solve every point; synthetic fields "
          "are for cmd_verify");

    const std::vector<double> eps_points =
        cfg.sweep.eps_list.empty() ? std::vector<double>{p.eps}
                                   : cfg.sweep.eps_list;
    struct Job {
      std::size_t gi, ei;
    };
    std::vector<Job> jobs;
    for (std::size_t gi = 0; gi < p.grids.size(); ++gi)
      for (std::size_t ei = 0; ei < eps_points.size(); ++ei)
        jobs.push_back({gi, ei});

    FieldCheckOptions opt = options_from(enabled, exps);
    opt.integrability = has_id(enabled, "p2_integrability");
    opt.grad_osc = true;

    std::vector<std::vector<DiagnosticReport>> results(jobs.size());
    std::vector<std::exception_ptr> errors(jobs.size());
    const auto run_one = [&](std::size_t idx) {
      try {
        const Job& job = jobs[idx];
        const Grid g = grid_for(p, p.grids[job.gi]);
        const double eps_e = eps_points[job.ei];
        const ScalarField u =
            solve_or_throw(g, bfn, exps, RegularizationParams(eps_e, p.sigma),
                           cfg.solver);
        std::vector<DiagnosticReport> rows =
            run_field_checks(cfg, exps, u, eps_e, opt);
        write_file_atomic(out_path(cfg, "sweep_job_" +
                                            std::to_string(job.gi) + "_" +
                                            std::to_string(job.ei) + ".csv"),
                          diagnostics_csv(rows));
        results[idx] = std::move(rows);
      } catch (...) {
        errors[idx] = std::current_exception();
      }
    };
    run_jobs(worker_count(cfg), jobs.size(), run_one);
    for (const std::exception_ptr& e : errors)
      if (e) std::rethrow_exception(e);

    std::vector<DiagnosticReport> merged;
    for (auto& r : results)
      for (auto& row : r) merged.push_back(std::move(row));

    // Aggregates on the finest grid.
    const Grid fine = grid_for(p, p.grids.back());
    if (has_id(enabled, "p2_integrability") && p.grids.size() >= 2) {
      std::vector<DiagnosticReport> monitors;
      for (const DiagnosticReport& row : merged)
        if (row.name == "p2_integrability" &&
            row.params.eps == eps_points.back())
          monitors.push_back(row);
      if (monitors.size() >= 2) {
        DiagnosticReport stability =
            integrability_stability(monitors, cfg.checks.stability_limit);
        stability.params.eps = eps_points.back();
        stability.params.sigma = p.sigma;
        merged.push_back(std::move(stability));
      }
    }
    std::vector<EpsConvergenceRow> eps_table;
    if (has_id(enabled, "eps_convergence"))
      append_eps_convergence(cfg, exps, fine, bfn, &merged, &eps_table);
    if (has_id(enabled, "sigma_limit"))
      append_sigma_limit(cfg, exps, fine, bfn, &merged);

    write_file_atomic(out_path(cfg, "sweep.csv"), diagnostics_csv(merged));

    if (cfg.output.write_svg) {
      const double h_fine = fine.h();
      // Empirical modulus constant vs log(R/r), per (eps, axis).
      std::vector<SvgSeries> mod_series;
      for (double eps_e : eps_points)
        for (int axis = 0; axis <= 2; ++axis) {
          SvgSeries s;
          for (const DiagnosticReport& row : merged) {
            if (row.note != "measurement" || row.params.h != h_fine) continue;
            if (row.name != "log_modulus_p" &&
                row.name != "log_modulus_aniso")
              continue;
            if (row.params.eps != eps_e || row.params.axis != axis) continue;
            s.x.push_back(std::log(row.params.R / row.params.r));
            s.y.push_back(row.ratio);
          }
          if (s.x.empty()) continue;
          s.label = "eps=" + fmt("%.3g", eps_e) +
                    (axis ? " axis=" + std::to_string(axis) : "");
          mod_series.push_back(std::move(s));
        }
      if (!mod_series.empty())
        write_file_atomic(
            out_path(cfg, "modulus_ratio.svg"),
            line_plot_svg("Empirical log-modulus constant A(r)",
                          {"log(R/r)", "A(r)", false, false}, mod_series));

      if (!eps_table.empty()) {
        SvgSeries lhs_s, rhs_s;
        lhs_s.label = "distance term";
        rhs_s.label = "eps bound";
        for (const EpsConvergenceRow& row : eps_table) {
          lhs_s.x.push_back(row.eps);
          lhs_s.y.push_back(row.lhs);
          rhs_s.x.push_back(row.eps);
          rhs_s.y.push_back(row.rhs);
        }
        write_file_atomic(
            out_path(cfg, "eps_convergence.svg"),
            line_plot_svg("Regularization convergence",
                          {"eps", "integral", true, true}, {lhs_s, rhs_s}));
      }

      std::vector<SvgSeries> osc_series;
      for (double eps_e : {eps_points.back()})
        for (int axis = 1; axis <= 2; ++axis) {
          SvgSeries s;
          for (const DiagnosticReport& row : merged) {
            if (row.name != "grad_osc" || row.params.h != h_fine) continue;
            if (row.params.eps != eps_e || row.params.axis != axis) continue;
            s.x.push_back(row.params.r);
            s.y.push_back(row.lhs);
          }
          if (s.x.empty()) continue;
          s.label = "axis " + std::to_string(axis) + ", eps=" +
                    fmt("%.3g", eps_e);
          osc_series.push_back(std::move(s));
        }
      if (!osc_series.empty())
        write_file_atomic(
            out_path(cfg, "gradient_oscillation.svg"),
            line_plot_svg("Oscillation of the gradient components",
                          {"r", "osc over B_r", true, false}, osc_series));
    }

    return all_pass(merged) ? exit_ok : exit_check_failure;
  } catch (const ConfigError& e) {
    return report_error("sweep", e, exit_config_error);
  } catch (const std::invalid_argument& e) {
    return report_error("sweep", e, exit_config_error);
  } catch (const SolverFailure& e) {
    return report_error("sweep", e, exit_solver_failure);
  } catch (const std::exception& e) {
    return report_error("sweep", e, exit_solver_failure);
  }
}

}  // namespace plap
