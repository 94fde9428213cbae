#include "plap/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "plap/boundary_data.hpp"

namespace plap {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::stringstream ss(s);
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

[[noreturn]] void bad(const std::string& section, const std::string& key,
                      const std::string& msg) {
  throw ConfigError("[" + section + "] " + key + ": " + msg);
}

double to_double(const std::string& section, const std::string& key,
                 const std::string& v) {
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0' || !std::isfinite(x))
    bad(section, key, "invalid number '" + v + "'");
  return x;
}

long long to_int(const std::string& section, const std::string& key,
                 const std::string& v) {
  char* end = nullptr;
  const long long x = std::strtoll(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0')
    bad(section, key, "invalid integer '" + v + "'");
  return x;
}

bool to_bool(const std::string& section, const std::string& key,
             const std::string& v) {
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  bad(section, key, "invalid boolean '" + v + "' (use true/false)");
}

std::vector<double> to_double_list(const std::string& section,
                                   const std::string& key,
                                   const std::string& v) {
  std::vector<double> out;
  for (const std::string& item : split_list(v))
    out.push_back(to_double(section, key, item));
  return out;
}

std::vector<int> to_int_list(const std::string& section,
                             const std::string& key, const std::string& v) {
  std::vector<int> out;
  for (const std::string& item : split_list(v))
    out.push_back(static_cast<int>(to_int(section, key, item)));
  return out;
}

void set_problem(ProblemSection* p, const std::string& key,
                 const std::string& v) {
  const std::string s = "problem";
  if (key == "origin_x1")
    p->origin.x1 = to_double(s, key, v);
  else if (key == "origin_x2")
    p->origin.x2 = to_double(s, key, v);
  else if (key == "extent_x1")
    p->extent_x1 = to_double(s, key, v);
  else if (key == "extent_x2")
    p->extent_x2 = to_double(s, key, v);
  else if (key == "grids")
    p->grids = to_int_list(s, key, v);
  else if (key == "boundary")
    p->boundary = v;
  else if (key.rfind("boundary.", 0) == 0)
    p->boundary_params[key] = to_double(s, key, v);
  else if (key == "p1")
    p->p1 = to_double(s, key, v);
  else if (key == "p2")
    p->p2 = to_double(s, key, v);
  else if (key == "eps")
    p->eps = to_double(s, key, v);
  else if (key == "sigma")
    p->sigma = to_double(s, key, v);
  else
    bad(s, key, "unknown key");
}

void set_solver(ExperimentConfig* c, const std::string& key,
                const std::string& v) {
  const std::string s = "solver";
  SolverConfig* sc = &c->solver;
  if (key == "tol")
    sc->tol = to_double(s, key, v);
  else if (key == "max_iters")
    sc->max_iters = static_cast<int>(to_int(s, key, v));
  else if (key == "continuation")
    sc->continuation = to_double_list(s, key, v);
  else if (key == "ls_beta")
    sc->ls_beta = to_double(s, key, v);
  else if (key == "ls_c")
    sc->ls_c = to_double(s, key, v);
  else if (key == "seed")
    sc->seed = static_cast<unsigned long long>(to_int(s, key, v));
  else if (key == "random_init")
    sc->random_init = to_bool(s, key, v);
  else if (key == "cg_tol")
    sc->cg_tol = to_double(s, key, v);
  else if (key == "cg_max_iters")
    sc->cg_max_iters = static_cast<int>(to_int(s, key, v));
  else if (key == "deterministic")
    c->deterministic = to_bool(s, key, v);
  else
    bad(s, key, "unknown key");
}

void set_disks(DisksSection* d, const std::string& key, const std::string& v) {
  const std::string s = "disks";
  if (key == "center_x1")
    d->center.x1 = to_double(s, key, v);
  else if (key == "center_x2")
    d->center.x2 = to_double(s, key, v);
  else if (key == "R")
    d->R = to_double(s, key, v);
  else if (key == "r_list")
    d->r_list = to_double_list(s, key, v);
  else
    bad(s, key, "unknown key");
}

void set_checks(ChecksSection* c, const std::string& key,
                const std::string& v) {
  const std::string s = "checks";
  if (key == "enable")
    c->enable = split_list(v);
  else if (key == "monotonicity_threshold")
    c->monotonicity_threshold = to_double(s, key, v);
  else if (key == "lebesgue_ratios")
    c->lebesgue_ratios = to_double_list(s, key, v);
  else if (key == "lebesgue_slack")
    c->lebesgue_slack = to_double(s, key, v);
  else if (key == "spread_limit")
    c->spread_limit = to_double(s, key, v);
  else if (key == "slope_limit")
    c->slope_limit = to_double(s, key, v);
  else if (key == "eps_slope_min")
    c->eps_slope_min = to_double(s, key, v);
  else if (key == "stability_limit")
    c->stability_limit = to_double(s, key, v);
  else if (key == "cutoff_inner")
    c->cutoff_inner = to_double(s, key, v);
  else if (key == "cutoff_outer")
    c->cutoff_outer = to_double(s, key, v);
  else if (key == "eps_ref")
    c->eps_ref = to_double(s, key, v);
  else if (key == "synthetic")
    c->synthetic = v;
  else if (key.rfind("synthetic.", 0) == 0)
    c->synthetic_params[key] = to_double(s, key, v);
  else
    bad(s, key, "unknown key");
}

void set_sweep(SweepSection* w, const std::string& key, const std::string& v) {
  const std::string s = "sweep";
  if (key == "eps_list")
    w->eps_list = to_double_list(s, key, v);
  else if (key == "sigma_list")
    w->sigma_list = to_double_list(s, key, v);
  else
    bad(s, key, "unknown key");
}

void set_output(OutputSection* o, const std::string& key,
                const std::string& v) {
  const std::string s = "output";
  if (key == "dir")
    o->dir = v;
  else if (key == "write_field")
    o->write_field = to_bool(s, key, v);
  else if (key == "write_svg")
    o->write_svg = to_bool(s, key, v);
  else
    bad(s, key, "unknown key");
}

void require_inside(const ExperimentConfig& cfg, double radius,
                    const std::string& what) {
  const ProblemSection& p = cfg.problem;
  const Point c = cfg.disks.center;
  const double tol = 1e-9 * std::max(p.extent_x1, p.extent_x2);
  if (c.x1 - radius < p.origin.x1 - tol ||
      c.x1 + radius > p.origin.x1 + p.extent_x1 + tol ||
      c.x2 - radius < p.origin.x2 - tol ||
      c.x2 + radius > p.origin.x2 + p.extent_x2 + tol)
    throw ConfigError("[disks] " + what + ": disk of radius " +
                      std::to_string(radius) +
                      " around the center leaves the domain rectangle");
}

struct Applicability {
  bool ok = false;
  const char* reason = "";
};

Applicability applicable(const ExperimentConfig& cfg, const std::string& id) {
  const bool have_r = !cfg.disks.r_list.empty();
  const bool synthetic = !cfg.checks.synthetic.empty();
  const double p1 = cfg.problem.p1, p2 = cfg.problem.p2;
  if (id == "osc_lebesgue")
    return {have_r && !cfg.checks.lebesgue_ratios.empty(),
            "requires [disks] r_list and [checks] lebesgue_ratios"};
  if (id == "deriv_max_principle") return {have_r, "requires [disks] r_list"};
  if (id == "energy_caccioppoli" || id == "deriv_caccioppoli" ||
      id == "transformed_grad_bound")
    return {true, ""};
  if (id == "log_modulus_p")
    return {p1 == p2 && have_r,
            "requires p1 == p2 and a nonempty [disks] r_list"};
  if (id == "log_modulus_aniso")
    return {p1 < p2 && have_r,
            "requires p1 < p2 and a nonempty [disks] r_list"};
  if (id == "p2_integrability") return {p1 < p2, "requires p1 < p2"};
  if (id == "eps_convergence")
    return {!cfg.sweep.eps_list.empty() && !synthetic,
            "requires [sweep] eps_list and no [checks] synthetic field"};
  if (id == "sigma_limit")
    return {!cfg.sweep.sigma_list.empty() && !synthetic,
            "requires [sweep] sigma_list and no [checks] synthetic field"};
  return {false, "unknown check id"};
}

}  // namespace

const std::vector<std::string>& known_check_ids() {
  static const std::vector<std::string> ids = {
      "osc_lebesgue",     "deriv_max_principle", "energy_caccioppoli",
      "deriv_caccioppoli", "transformed_grad_bound", "log_modulus_p",
      "log_modulus_aniso", "p2_integrability",   "eps_convergence",
      "sigma_limit"};
  return ids;
}

std::vector<std::string> resolve_enabled_checks(const ExperimentConfig& cfg) {
  std::vector<std::string> out;
  if (cfg.checks.enable.empty()) {
    for (const std::string& id : known_check_ids())
      if (applicable(cfg, id).ok) out.push_back(id);
    return out;
  }
  for (const std::string& id : cfg.checks.enable) {
    const Applicability a = applicable(cfg, id);
    if (!a.ok)
      throw ConfigError("[checks] enable: '" + id +
                        "' is not applicable to this configuration (" +
                        a.reason + ")");
    out.push_back(id);
  }
  return out;
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::string section;
  std::stringstream ss(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(ss, raw)) {
    ++lineno;
    std::string line = raw;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("line " + std::to_string(lineno) +
                          ": malformed section header '" + raw + "'");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "problem" && section != "solver" && section != "disks" &&
          section != "checks" && section != "sweep" && section != "output")
        throw ConfigError("line " + std::to_string(lineno) +
                          ": unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) +
                        ": expected 'key = value', got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    if (section.empty())
      throw ConfigError("line " + std::to_string(lineno) + ": key '" + key +
                        "' appears before any [section] header");
    if (section == "problem")
      set_problem(&cfg.problem, key, value);
    else if (section == "solver")
      set_solver(&cfg, key, value);
    else if (section == "disks")
      set_disks(&cfg.disks, key, value);
    else if (section == "checks")
      set_checks(&cfg.checks, key, value);
    else if (section == "sweep")
      set_sweep(&cfg.sweep, key, value);
    else
      set_output(&cfg.output, key, value);
  }
  validate_config(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_config(buf.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

void validate_config(const ExperimentConfig& cfg) {
  const ProblemSection& p = cfg.problem;
  if (!(p.extent_x1 > 0.0) || !(p.extent_x2 > 0.0))
    throw ConfigError("[problem] extent_x1/extent_x2: must be positive");
  if (p.grids.empty()) throw ConfigError("[problem] grids: empty list");
  for (std::size_t k = 0; k < p.grids.size(); ++k) {
    if (p.grids[k] < 3)
      throw ConfigError("[problem] grids: entry " + std::to_string(p.grids[k]) +
                        " is below the minimum of 3 nodes");
    if (k > 0 && p.grids[k] <= p.grids[k - 1])
      throw ConfigError("[problem] grids: list must be strictly increasing");
    // Equal spacing along both axes must be achievable on this rectangle.
    const double h = p.extent_x1 / (p.grids[k] - 1);
    const double steps = p.extent_x2 / h;
    if (std::fabs(steps - std::llround(steps)) > 1e-9 * std::max(1.0, steps) ||
        std::llround(steps) < 2)
      throw ConfigError(
          "[problem] grids: nx=" + std::to_string(p.grids[k]) +
          " gives spacing that does not evenly divide extent_x2");
  }
  try {
    ExponentPair check(p.p1, p.p2);
    (void)check;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("[problem] p1/p2: ") + e.what());
  }
  if (!(p.eps >= 0.0) || !std::isfinite(p.eps))
    throw ConfigError("[problem] eps: must be finite and >= 0");
  if (!(p.sigma >= 0.0) || !std::isfinite(p.sigma))
    throw ConfigError("[problem] sigma: must be finite and >= 0");
  try {
    validate_boundary_params(p.boundary, p.boundary_params);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("[problem] boundary: ") + e.what());
  }

  const SolverConfig& sc = cfg.solver;
  if (!(sc.tol > 0.0)) throw ConfigError("[solver] tol: must be > 0");
  if (sc.max_iters < 1) throw ConfigError("[solver] max_iters: must be >= 1");
  if (!(sc.ls_beta > 0.0 && sc.ls_beta < 1.0))
    throw ConfigError("[solver] ls_beta: must lie in (0,1)");
  if (!(sc.ls_c > 0.0 && sc.ls_c < 1.0))
    throw ConfigError("[solver] ls_c: must lie in (0,1)");
  if (!(sc.cg_tol > 0.0)) throw ConfigError("[solver] cg_tol: must be > 0");
  if (sc.cg_max_iters < 1)
    throw ConfigError("[solver] cg_max_iters: must be >= 1");
  for (std::size_t k = 0; k < sc.continuation.size(); ++k) {
    if (!(sc.continuation[k] > 0.0))
      throw ConfigError("[solver] continuation: entries must be positive");
    if (k > 0 && !(sc.continuation[k] < sc.continuation[k - 1]))
      throw ConfigError(
          "[solver] continuation: list must be strictly decreasing");
  }

  const DisksSection& d = cfg.disks;
  if (!(d.R > 0.0)) throw ConfigError("[disks] R: must be > 0");
  for (double r : d.r_list)
    if (!(r > 0.0) || !(r < d.R))
      throw ConfigError("[disks] r_list: every radius must satisfy 0 < r < R");

  const ChecksSection& ck = cfg.checks;
  for (const std::string& id : ck.enable) {
    const auto& ids = known_check_ids();
    if (std::find(ids.begin(), ids.end(), id) == ids.end())
      throw ConfigError("[checks] enable: unknown check id '" + id + "'");
  }
  if (!(ck.monotonicity_threshold >= 0.0))
    throw ConfigError("[checks] monotonicity_threshold: must be >= 0");
  for (double q : ck.lebesgue_ratios)
    if (!(q > 1.0))
      throw ConfigError("[checks] lebesgue_ratios: ratios must be > 1");
  if (!(ck.spread_limit > 0.0))
    throw ConfigError("[checks] spread_limit: must be > 0");
  if (!(ck.stability_limit > 0.0))
    throw ConfigError("[checks] stability_limit: must be > 0");
  const double cut_in = ck.cutoff_inner < 0.0 ? d.R : ck.cutoff_inner;
  const double cut_out = ck.cutoff_outer < 0.0 ? 2.0 * d.R : ck.cutoff_outer;
  if (!(cut_in > 0.0 && cut_in < cut_out))
    throw ConfigError(
        "[checks] cutoff_inner/cutoff_outer: need 0 < inner < outer");
  if (!ck.synthetic.empty()) {
    try {
      validate_synthetic_params(ck.synthetic, ck.synthetic_params);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("[checks] synthetic: ") + e.what());
    }
  } else if (!ck.synthetic_params.empty()) {
    throw ConfigError("[checks] " + ck.synthetic_params.begin()->first +
                      ": set without a [checks] synthetic field id");
  }

  // Geometric containment of every disk the enabled checks will reference.
  const std::vector<std::string> enabled = resolve_enabled_checks(cfg);
  const auto runs = [&](const char* id) {
    return std::find(enabled.begin(), enabled.end(), id) != enabled.end();
  };
  double reach = 0.0;
  if (!d.r_list.empty())
    reach = *std::max_element(d.r_list.begin(), d.r_list.end());
  if (runs("osc_lebesgue"))
    for (double r : d.r_list)
      for (double q : ck.lebesgue_ratios) reach = std::max(reach, r * q);
  if (runs("energy_caccioppoli") || runs("deriv_caccioppoli") ||
      runs("transformed_grad_bound"))
    reach = std::max(reach, cut_out);
  if (runs("log_modulus_p") || runs("log_modulus_aniso") ||
      runs("p2_integrability"))
    reach = std::max(reach, 2.0 * d.R);
  if (reach > 0.0) require_inside(cfg, reach, "largest referenced radius");

  const SweepSection& w = cfg.sweep;
  for (std::size_t k = 0; k < w.eps_list.size(); ++k) {
    if (!(w.eps_list[k] > 0.0))
      throw ConfigError("[sweep] eps_list: entries must be positive");
    if (k > 0 && !(w.eps_list[k] < w.eps_list[k - 1]))
      throw ConfigError("[sweep] eps_list: list must be strictly decreasing");
  }
  for (std::size_t k = 0; k < w.sigma_list.size(); ++k) {
    if (!(w.sigma_list[k] >= 0.0))
      throw ConfigError("[sweep] sigma_list: entries must be >= 0");
    if (k > 0 && !(w.sigma_list[k] < w.sigma_list[k - 1]))
      throw ConfigError(
          "[sweep] sigma_list: list must be strictly decreasing");
  }
  if (!w.eps_list.empty() && ck.eps_ref >= 0.0 &&
      !(ck.eps_ref < w.eps_list.back()))
    throw ConfigError("[checks] eps_ref: must be below min(eps_list)");

  if (cfg.output.dir.empty()) throw ConfigError("[output] dir: empty path");
  if (cfg.threads < 1) throw ConfigError("--threads: must be >= 1");
}

}  // namespace plap
