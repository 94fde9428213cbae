#pragma once

#include <vector>

#include "plap/grid.hpp"

namespace plap {

/// Axis exponents (p1, p2) with 2 <= p1 <= p2 < inf.
struct ExponentPair {
  double p1 = 2.0;
  double p2 = 2.0;

  ExponentPair() = default;
  ExponentPair(double p1_, double p2_);  // validates, throws invalid_argument
};

/// Conditioning parameters: eps adds (eps*(p_i-1)/2) g_i^2 to the energy
/// density, sigma adds sigma*|g1|^{p2}/p2 (axis 1 only).
struct RegularizationParams {
  double eps = 0.0;
  double sigma = 0.0;

  RegularizationParams() = default;
  RegularizationParams(double eps_, double sigma_);  // validates
};

/// |t|^{p-2} t for p >= 2; odd and nondecreasing in t, exact identity at p=2.
double p_flux(double t, double p);

/// (|b|^{p-2}b - |a|^{p-2}a)(b-a) - 2^{2-p}|b-a|^p; nonnegative for p >= 2,
/// identically zero at p = 2.
double p_inequality_gap(double a, double b, double p);

/// Discrete energy
///   h^2 * sum_cells [ |g1|^{p1}/p1 + |g2|^{p2}/p2
///                     + eps((p1-1)g1^2 + (p2-1)g2^2)/2 + sigma|g1|^{p2}/p2 ]
/// with (g1,g2) = discrete_gradient(u). The quadratic term uses (p_i-1) so
/// that `residual` below is its exact derivative.
double energy(const ScalarField& u, const ExponentPair& exps,
              const RegularizationParams& reg);

/// Exact gradient of `energy` with respect to interior nodal values;
/// boundary entries are zero. Entry n equals
///   h/2 * sum_{cells at n} [ +-f1(cell) +- f2(cell) ]
/// with f_i = p_flux(g_i, p_i) + eps(p_i-1)g_i (+ sigma p_flux(g1, p2) on
/// axis 1) and signs from the two-difference gradient stencil.
ScalarField residual(const ScalarField& u, const ExponentPair& exps,
                     const RegularizationParams& reg);

// --------------------------------------------------------------------------
// Second-derivative helpers for the Newton solver. The Hessian of the energy
// acts on nodal increments v (zero on the boundary) as
//   (H v)_n = h/2 * scatter_edge(c1 .* g1(v), c2 .* g2(v))_n
// with per-cell coefficients
//   c1 = (p1-1)(|g1|^{p1-2} + eps) + sigma(p2-1)|g1|^{p2-2}
//   c2 = (p2-1)(|g2|^{p2-2} + eps)
// evaluated at the current iterate's gradient.
// --------------------------------------------------------------------------

void hessian_coeffs(const CellGradientField& gf, const ExponentPair& exps,
                    const RegularizationParams& reg, std::vector<double>* c1,
                    std::vector<double>* c2);

/// y = H v with boundary rows zeroed; g1s/g2s are cell-sized scratch buffers.
void hessian_apply(const Grid& g, const std::vector<double>& c1,
                   const std::vector<double>& c2, const std::vector<double>& v,
                   std::vector<double>* y, std::vector<double>* g1s,
                   std::vector<double>* g2s);

/// Diagonal of H (interior nodes; boundary entries set to 1 so a Jacobi
/// preconditioner can divide by it unconditionally).
std::vector<double> hessian_diag(const Grid& g, const std::vector<double>& c1,
                                 const std::vector<double>& c2);

/// Zero the boundary ring of a nodal vector in place.
void zero_boundary(const Grid& g, std::vector<double>* v);

}  // namespace plap
