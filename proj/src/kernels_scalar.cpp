// Reference kernels. Plain loops, strict left-to-right accumulation; this
// backend defines the semantics the SIMD variants are tested against.

#include "plap/kernels.hpp"

#include <cmath>

namespace plap::kernels {
namespace {

// |t|^p with the conventions the rest of the code relies on:
// p == 0 gives 1 (including t == 0), p > 0 gives 0 at t == 0.
inline double apow(double t, double p) {
  if (p == 0.0) return 1.0;
  if (p == 1.0) return std::fabs(t);
  if (p == 2.0) return t * t;
  return std::pow(std::fabs(t), p);
}

// sign(t)|t|^p, p >= 1.
inline double spow(double t, double p) {
  if (p == 1.0) return t;
  return std::copysign(apow(t, p), t);
}

void cell_gradient(const double* u, int nx, int ny, double inv2h, double* g1,
                   double* g2) {
  const int ncx = nx - 1;
  for (int cj = 0; cj < ny - 1; ++cj) {
    const double* r0 = u + static_cast<std::size_t>(cj) * nx;
    const double* r1 = r0 + nx;
    double* o1 = g1 + static_cast<std::size_t>(cj) * ncx;
    double* o2 = g2 + static_cast<std::size_t>(cj) * ncx;
    for (int ci = 0; ci < ncx; ++ci) {
      const double u00 = r0[ci], u10 = r0[ci + 1];
      const double u01 = r1[ci], u11 = r1[ci + 1];
      o1[ci] = (u10 - u00 + u11 - u01) * inv2h;
      o2[ci] = (u01 - u00 + u11 - u10) * inv2h;
    }
  }
}

void scatter_edge(const double* t1, const double* t2, int nx, int ny, double s,
                  double* out) {
  const int ncx = nx - 1;
  for (int cj = 0; cj < ny - 1; ++cj) {
    const double* a = t1 + static_cast<std::size_t>(cj) * ncx;
    const double* b = t2 + static_cast<std::size_t>(cj) * ncx;
    double* r0 = out + static_cast<std::size_t>(cj) * nx;
    double* r1 = r0 + nx;
    for (int ci = 0; ci < ncx; ++ci) {
      const double st1 = s * a[ci], st2 = s * b[ci];
      r0[ci] += -st1 - st2;
      r0[ci + 1] += st1 - st2;
      r1[ci] += -st1 + st2;
      r1[ci + 1] += st1 + st2;
    }
  }
}

void scatter_sum(const double* t, int nx, int ny, double s, double* out) {
  const int ncx = nx - 1;
  for (int cj = 0; cj < ny - 1; ++cj) {
    const double* a = t + static_cast<std::size_t>(cj) * ncx;
    double* r0 = out + static_cast<std::size_t>(cj) * nx;
    double* r1 = r0 + nx;
    for (int ci = 0; ci < ncx; ++ci) {
      const double st = s * a[ci];
      r0[ci] += st;
      r0[ci + 1] += st;
      r1[ci] += st;
      r1[ci + 1] += st;
    }
  }
}

void flux(const double* g1, const double* g2, std::size_t n, double p1,
          double p2, double eps, double sigma, double* f1, double* f2) {
  const double e1 = eps * (p1 - 1.0), e2 = eps * (p2 - 1.0);
  for (std::size_t k = 0; k < n; ++k) {
    double a = spow(g1[k], p1 - 1.0) + e1 * g1[k];
    if (sigma != 0.0) a += sigma * spow(g1[k], p2 - 1.0);
    f1[k] = a;
    f2[k] = spow(g2[k], p2 - 1.0) + e2 * g2[k];
  }
}

void flux_deriv(const double* g1, const double* g2, std::size_t n, double p1,
                double p2, double eps, double sigma, double* c1, double* c2) {
  const double q1 = p1 - 1.0, q2 = p2 - 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    double a = q1 * (apow(g1[k], p1 - 2.0) + eps);
    if (sigma != 0.0) a += sigma * q2 * apow(g1[k], p2 - 2.0);
    c1[k] = a;
    c2[k] = q2 * (apow(g2[k], p2 - 2.0) + eps);
  }
}

double energy_sum(const double* g1, const double* g2, std::size_t n, double p1,
                  double p2, double eps, double sigma) {
  const double e1 = 0.5 * eps * (p1 - 1.0), e2 = 0.5 * eps * (p2 - 1.0);
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double a = g1[k], b = g2[k];
    double v = apow(a, p1) / p1 + apow(b, p2) / p2 + e1 * a * a + e2 * b * b;
    if (sigma != 0.0) v += sigma * apow(a, p2) / p2;
    acc += v;
  }
  return acc;
}

void abs_pow(const double* x, std::size_t n, double p, double* out) {
  for (std::size_t k = 0; k < n; ++k) out[k] = apow(x[k], p);
}

void sgn_pow(const double* x, std::size_t n, double p, double* out) {
  for (std::size_t k = 0; k < n; ++k) out[k] = spow(x[k], p);
}

double dot(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) acc += a[k] * b[k];
  return acc;
}

double sum(const double* a, std::size_t n) {
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) acc += a[k];
  return acc;
}

double max_abs(const double* a, std::size_t n) {
  double m = 0.0;
  for (std::size_t k = 0; k < n; ++k) m = std::max(m, std::fabs(a[k]));
  return m;
}

void minmax(const double* a, std::size_t n, double* mn, double* mx) {
  double lo = a[0], hi = a[0];
  for (std::size_t k = 1; k < n; ++k) {
    lo = std::min(lo, a[k]);
    hi = std::max(hi, a[k]);
  }
  *mn = lo;
  *mx = hi;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) y[k] += alpha * x[k];
}

void xpby(const double* x, double beta, double* y, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) y[k] = x[k] + beta * y[k];
}

void mul(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) out[k] = a[k] * b[k];
}

}  // namespace

namespace detail {
const Ops scalar_ops = {
    cell_gradient, scatter_edge, scatter_sum, flux, flux_deriv, energy_sum,
    abs_pow,       sgn_pow,      dot,         sum,  max_abs,    minmax,
    axpy,          xpby,         mul,
};
}  // namespace detail

}  // namespace plap::kernels
