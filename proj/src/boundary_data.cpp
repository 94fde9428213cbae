#include "plap/boundary_data.hpp"

#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>

namespace plap {
namespace {

double get(const std::map<std::string, double>& params, const std::string& key,
           double fallback) {
  const auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

void require_keys(const std::string& id,
                  const std::map<std::string, double>& params,
                  const std::string& prefix,
                  const std::set<std::string>& allowed) {
  for (const auto& [key, value] : params) {
    (void)value;
    if (!allowed.count(key))
      throw std::invalid_argument("'" + id + "': unknown parameter '" + key +
                                  "'");
  }
  (void)prefix;
}

}  // namespace

void validate_boundary_params(const std::string& id,
                              const std::map<std::string, double>& params) {
  if (id == "affine") {
    require_keys(id, params, "boundary.",
                 {"boundary.a0", "boundary.a1", "boundary.a2"});
  } else if (id == "separable") {
    require_keys(id, params, "boundary.", {"boundary.A"});
    if (!(get(params, "boundary.A", 0.5) > 0.0))
      throw std::invalid_argument("'separable': boundary.A must be > 0");
  } else if (id == "corner") {
    require_keys(id, params, "boundary.", {"boundary.amp", "boundary.q"});
    if (!(get(params, "boundary.q", 1.0) >= 1.0))
      throw std::invalid_argument("'corner': boundary.q must be >= 1");
  } else if (id == "trig") {
    require_keys(id, params, "boundary.",
                 {"boundary.amp", "boundary.kx", "boundary.ky", "boundary.a1",
                  "boundary.a2"});
  } else {
    throw std::invalid_argument("unknown boundary id '" + id + "'");
  }
}

BoundaryFn make_boundary(const std::string& id,
                         const std::map<std::string, double>& params,
                         const ExponentPair& exps) {
  validate_boundary_params(id, params);
  if (id == "affine") {
    const double a0 = get(params, "boundary.a0", 0.0);
    const double a1 = get(params, "boundary.a1", 1.0);
    const double a2 = get(params, "boundary.a2", 1.0);
    return [=](Point q) { return a0 + a1 * q.x1 + a2 * q.x2; };
  }
  if (id == "separable") {
    const SeparableSolution s =
        build_separable_solution(exps, get(params, "boundary.A", 0.5));
    return [=](Point q) { return s.value(q); };
  }
  if (id == "corner") {
    const double amp = get(params, "boundary.amp", 1.0);
    const double q_exp = get(params, "boundary.q", 1.0);
    return [=](Point q) {
      return amp * (std::pow(std::fabs(q.x1), q_exp) -
                    std::pow(std::fabs(q.x2), q_exp));
    };
  }
  // trig
  const double amp = get(params, "boundary.amp", 1.0);
  const double kx = get(params, "boundary.kx", 1.0);
  const double ky = get(params, "boundary.ky", 1.0);
  const double a1 = get(params, "boundary.a1", 0.0);
  const double a2 = get(params, "boundary.a2", 0.0);
  const double pi = std::numbers::pi;
  return [=](Point q) {
    return amp * std::cos(kx * pi * q.x1) * std::cos(ky * pi * q.x2) +
           a1 * q.x1 + a2 * q.x2;
  };
}

void validate_synthetic_params(const std::string& id,
                               const std::map<std::string, double>& params) {
  if (id == "wiggle") {
    require_keys(id, params, "synthetic.",
                 {"synthetic.amp", "synthetic.k"});
    if (!(get(params, "synthetic.k", 24.0) > 0.0))
      throw std::invalid_argument("'wiggle': synthetic.k must be > 0");
  } else if (id == "bump") {
    require_keys(id, params, "synthetic.",
                 {"synthetic.amp", "synthetic.w"});
    if (!(get(params, "synthetic.w", 0.1) > 0.0))
      throw std::invalid_argument("'bump': synthetic.w must be > 0");
  } else {
    throw std::invalid_argument("unknown synthetic id '" + id + "'");
  }
}

ScalarField make_synthetic_field(const Grid& g, const std::string& id,
                                 const std::map<std::string, double>& params) {
  validate_synthetic_params(id, params);
  if (id == "wiggle") {
    const double amp = get(params, "synthetic.amp", 0.05);
    const double k = get(params, "synthetic.k", 24.0);
    const double kpi = k * std::numbers::pi;
    return sample_nodal(g, [=](Point q) {
      return amp * std::sin(kpi * q.x1) * std::sin(kpi * q.x2);
    });
  }
  // bump
  const double amp = get(params, "synthetic.amp", 1.0);
  const double w = get(params, "synthetic.w", 0.1);
  const Point c{g.origin().x1 + 0.5 * g.lx(), g.origin().x2 + 0.5 * g.ly()};
  return sample_nodal(g, [=](Point q) {
    const double dx = q.x1 - c.x1, dy = q.x2 - c.x2;
    return amp * std::exp(-(dx * dx + dy * dy) / (w * w));
  });
}

}  // namespace plap
