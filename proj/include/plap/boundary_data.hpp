#pragma once

#include <map>
#include <string>

#include "plap/energy.hpp"
#include "plap/grid.hpp"
#include "plap/solver.hpp"

namespace plap {

/// Dirichlet data by id. Parameter keys are "boundary.<name>"; unknown ids or
/// keys throw std::invalid_argument naming them.
///
///   affine     a0 + a1*x1 + a2*x2            (boundary.a0/.a1/.a2; 0,1,1)
///   separable  A|x1|^a - B|x2|^b             (boundary.A; 0.5) — the closed
///              -form solution for the configured exponents, so solving with
///              this data reproduces it up to discretization error
///   corner     amp*(|x1|^q - |x2|^q)         (boundary.amp/.q; 1, 1) —
///              Lipschitz corner data at the default q = 1
///   trig       amp*cos(kx*pi*x1)*cos(ky*pi*x2) + a1*x1 + a2*x2
///              (boundary.amp/.kx/.ky/.a1/.a2; 1, 1, 1, 0, 0)
BoundaryFn make_boundary(const std::string& id,
                         const std::map<std::string, double>& params,
                         const ExponentPair& exps);

/// Validate id and parameter keys without building (used by config checking).
void validate_boundary_params(const std::string& id,
                              const std::map<std::string, double>& params);

/// Synthetic whole-domain fields for negative controls; these are sampled
/// directly instead of running the solver. Parameter keys are
/// "synthetic.<name>".
///
///   wiggle  amp*sin(k*pi*x1)*sin(k*pi*x2)    (synthetic.amp/.k; 0.05, 24) —
///           high-frequency non-solution whose second differences break the
///           derivative energy estimates
///   bump    amp*exp(-rho^2/w^2), rho = distance to the domain center
///           (synthetic.amp/.w; 1, 0.1) — its axis derivatives peak strictly
///           inside any disk around the center, breaking monotonicity
ScalarField make_synthetic_field(const Grid& g, const std::string& id,
                                 const std::map<std::string, double>& params);

void validate_synthetic_params(const std::string& id,
                               const std::map<std::string, double>& params);

}  // namespace plap
