#include "plap/energy.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "plap/kernels.hpp"

namespace plap {

ExponentPair::ExponentPair(double p1_, double p2_) : p1(p1_), p2(p2_) {
  if (!(p1 >= 2.0) || !(p2 >= p1) || !std::isfinite(p2))
    throw std::invalid_argument("exponents: need 2 <= p1 <= p2 < inf, got p1=" +
                                std::to_string(p1) +
                                " p2=" + std::to_string(p2));
}

RegularizationParams::RegularizationParams(double eps_, double sigma_)
    : eps(eps_), sigma(sigma_) {
  if (!(eps >= 0.0) || !std::isfinite(eps))
    throw std::invalid_argument("regularization: eps must be finite and >= 0");
  if (!(sigma >= 0.0) || !std::isfinite(sigma))
    throw std::invalid_argument(
        "regularization: sigma must be finite and >= 0");
}

double p_flux(double t, double p) {
  if (p == 2.0) return t;
  if (t == 0.0) return 0.0;
  return std::copysign(std::pow(std::fabs(t), p - 1.0), t);
}

double p_inequality_gap(double a, double b, double p) {
  const double d = b - a;
  const double ad = std::fabs(d);
  const double pow_term = (p == 2.0) ? ad * ad : std::pow(ad, p);
  return (p_flux(b, p) - p_flux(a, p)) * d - std::exp2(2.0 - p) * pow_term;
}

double energy(const ScalarField& u, const ExponentPair& exps,
              const RegularizationParams& reg) {
  const CellGradientField gf = discrete_gradient(u);
  const double cell_sum = kernels::ops().energy_sum(
      gf.g1.values().data(), gf.g2.values().data(), u.grid().cell_count(),
      exps.p1, exps.p2, reg.eps, reg.sigma);
  const double h = u.grid().h();
  return cell_sum * h * h;
}

void zero_boundary(const Grid& g, std::vector<double>* v) {
  double* p = v->data();
  const int nx = g.nx(), ny = g.ny();
  for (int i = 0; i < nx; ++i) {
    p[g.node_index(i, 0)] = 0.0;
    p[g.node_index(i, ny - 1)] = 0.0;
  }
  for (int j = 1; j < ny - 1; ++j) {
    p[g.node_index(0, j)] = 0.0;
    p[g.node_index(nx - 1, j)] = 0.0;
  }
}

ScalarField residual(const ScalarField& u, const ExponentPair& exps,
                     const RegularizationParams& reg) {
  const Grid& g = u.grid();
  const CellGradientField gf = discrete_gradient(u);
  const std::size_t nc = g.cell_count();
  std::vector<double> f1(nc), f2(nc);
  kernels::ops().flux(gf.g1.values().data(), gf.g2.values().data(), nc,
                      exps.p1, exps.p2, reg.eps, reg.sigma, f1.data(),
                      f2.data());
  ScalarField out(g);
  kernels::ops().scatter_edge(f1.data(), f2.data(), g.nx(), g.ny(),
                              0.5 * g.h(), out.values().data());
  zero_boundary(g, &out.values());
  return out;
}

void hessian_coeffs(const CellGradientField& gf, const ExponentPair& exps,
                    const RegularizationParams& reg, std::vector<double>* c1,
                    std::vector<double>* c2) {
  const std::size_t nc = gf.grid().cell_count();
  c1->resize(nc);
  c2->resize(nc);
  kernels::ops().flux_deriv(gf.g1.values().data(), gf.g2.values().data(), nc,
                            exps.p1, exps.p2, reg.eps, reg.sigma, c1->data(),
                            c2->data());
}

void hessian_apply(const Grid& g, const std::vector<double>& c1,
                   const std::vector<double>& c2, const std::vector<double>& v,
                   std::vector<double>* y, std::vector<double>* g1s,
                   std::vector<double>* g2s) {
  const std::size_t nc = g.cell_count();
  g1s->resize(nc);
  g2s->resize(nc);
  const auto& k = kernels::ops();
  k.cell_gradient(v.data(), g.nx(), g.ny(), 1.0 / (2.0 * g.h()), g1s->data(),
                  g2s->data());
  k.mul(c1.data(), g1s->data(), g1s->data(), nc);
  k.mul(c2.data(), g2s->data(), g2s->data(), nc);
  y->assign(g.node_count(), 0.0);
  k.scatter_edge(g1s->data(), g2s->data(), g.nx(), g.ny(), 0.5 * g.h(),
                 y->data());
  zero_boundary(g, y);
}

std::vector<double> hessian_diag(const Grid& g, const std::vector<double>& c1,
                                 const std::vector<double>& c2) {
  const std::size_t nc = g.cell_count();
  std::vector<double> csum(nc);
  const auto& k = kernels::ops();
  // Each corner of a cell sees (c1+c2)/(2h)^2 * h^2 = (c1+c2)/4.
  for (std::size_t i = 0; i < nc; ++i) csum[i] = c1[i] + c2[i];
  std::vector<double> diag(g.node_count(), 0.0);
  k.scatter_sum(csum.data(), g.nx(), g.ny(), 0.25, diag.data());
  const int nx = g.nx(), ny = g.ny();
  for (int i = 0; i < nx; ++i) {
    diag[g.node_index(i, 0)] = 1.0;
    diag[g.node_index(i, ny - 1)] = 1.0;
  }
  for (int j = 1; j < ny - 1; ++j) {
    diag[g.node_index(0, j)] = 1.0;
    diag[g.node_index(nx - 1, j)] = 1.0;
  }
  return diag;
}

}  // namespace plap
