#pragma once

#include <cstddef>
#include <string_view>

namespace plap::kernels {

/// Kernel backends. `scalar` is the reference implementation with strict
/// left-to-right reductions; `avx2` processes four doubles per lane with
/// fixed-order lane combining. Both are run-to-run deterministic; only
/// `scalar` is bit-portable across machines.
enum class Backend { scalar, avx2 };

/// Dispatch table for the arithmetic inner loops. All pointers are non-null.
///
/// Grid conventions: nodal arrays are nx*ny, row-major with node (i,j) at
/// j*nx + i. Cell arrays are (nx-1)*(ny-1), cell (ci,cj) at cj*(nx-1) + ci,
/// cell corners u00=(ci,cj), u10=(ci+1,cj), u01=(ci,cj+1), u11=(ci+1,cj+1).
struct Ops {
  // Two-difference cell gradient:
  //   g1 = (u10 - u00 + u11 - u01) * inv2h
  //   g2 = (u01 - u00 + u11 - u10) * inv2h
  void (*cell_gradient)(const double* u, int nx, int ny, double inv2h,
                        double* g1, double* g2);

  // Divergence-pattern accumulation of per-cell pairs (t1,t2) into nodes:
  //   out[00] += s*(-t1-t2), out[10] += s*(+t1-t2),
  //   out[01] += s*(-t1+t2), out[11] += s*(+t1+t2)
  void (*scatter_edge)(const double* t1, const double* t2, int nx, int ny,
                       double s, double* out);

  // All-plus accumulation: every corner of each cell gets s*t(cell).
  void (*scatter_sum)(const double* t, int nx, int ny, double s, double* out);

  // f1 = sgn(g1)|g1|^{p1-1} + eps*(p1-1)*g1 + sigma*sgn(g1)|g1|^{p2-1}
  // f2 = sgn(g2)|g2|^{p2-1} + eps*(p2-1)*g2
  void (*flux)(const double* g1, const double* g2, std::size_t n, double p1,
               double p2, double eps, double sigma, double* f1, double* f2);

  // c1 = (p1-1)(|g1|^{p1-2} + eps) + sigma*(p2-1)|g1|^{p2-2}
  // c2 = (p2-1)(|g2|^{p2-2} + eps)
  void (*flux_deriv)(const double* g1, const double* g2, std::size_t n,
                     double p1, double p2, double eps, double sigma,
                     double* c1, double* c2);

  // Sum over cells of
  //   |g1|^{p1}/p1 + |g2|^{p2}/p2
  //   + eps*((p1-1)g1^2 + (p2-1)g2^2)/2 + sigma*|g1|^{p2}/p2
  double (*energy_sum)(const double* g1, const double* g2, std::size_t n,
                       double p1, double p2, double eps, double sigma);

  void (*abs_pow)(const double* x, std::size_t n, double p, double* out);
  void (*sgn_pow)(const double* x, std::size_t n, double p, double* out);

  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*sum)(const double* a, std::size_t n);
  double (*max_abs)(const double* a, std::size_t n);
  void (*minmax)(const double* a, std::size_t n, double* mn, double* mx);
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  void (*xpby)(const double* x, double beta, double* y, std::size_t n);
  void (*mul)(const double* a, const double* b, double* out, std::size_t n);
};

/// Active dispatch table. Defaults to the best supported backend.
const Ops& ops();

Backend active();
bool supported(Backend b);
std::string_view name(Backend b);

/// Select a backend explicitly. Throws std::runtime_error if unsupported
/// on this CPU. Not thread-safe against concurrent kernel calls.
void force(Backend b);

/// Re-select the best supported backend (avx2 when available).
void use_best();

namespace detail {
extern const Ops scalar_ops;
#if defined(__x86_64__) || defined(_M_X64)
extern const Ops avx2_ops;
bool cpu_has_avx2();
#endif
}  // namespace detail

}  // namespace plap::kernels
