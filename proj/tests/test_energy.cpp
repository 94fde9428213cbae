#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "plap/energy.hpp"
#include "plap/grid.hpp"

using namespace plap;

namespace {

// Independent reference: assemble the energy density cell by cell straight
// from its definition with std::pow, without the kernel layer.
double energy_reference(const ScalarField& u, const ExponentPair& e,
                        const RegularizationParams& reg) {
  const Grid& g = u.grid();
  const double h = g.h();
  double acc = 0.0;
  for (int cj = 0; cj < g.ncy(); ++cj)
    for (int ci = 0; ci < g.ncx(); ++ci) {
      const double u00 = u.at(ci, cj), u10 = u.at(ci + 1, cj);
      const double u01 = u.at(ci, cj + 1), u11 = u.at(ci + 1, cj + 1);
      const double g1 = (u10 - u00 + u11 - u01) / (2 * h);
      const double g2 = (u01 - u00 + u11 - u10) / (2 * h);
      acc += std::pow(std::fabs(g1), e.p1) / e.p1 +
             std::pow(std::fabs(g2), e.p2) / e.p2 +
             reg.eps * ((e.p1 - 1) * g1 * g1 + (e.p2 - 1) * g2 * g2) / 2 +
             reg.sigma * std::pow(std::fabs(g1), e.p2) / e.p2;
    }
  return h * h * acc;
}

ScalarField random_field(const Grid& g, unsigned seed, double amp = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-amp, amp);
  ScalarField u(g);
  for (double& v : u.values()) v = dist(rng);
  return u;
}

ScalarField random_interior_direction(const Grid& g, unsigned seed) {
  ScalarField v = random_field(g, seed);
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i)
      if (g.is_boundary(i, j)) v.at(i, j) = 0.0;
  return v;
}

double inner(const ScalarField& a, const ScalarField& b) {
  double acc = 0.0;
  for (std::size_t k = 0; k < a.values().size(); ++k)
    acc += a.values()[k] * b.values()[k];
  return acc;
}

}  // namespace

TEST_CASE("exponent and regularization parameter validation") {
  CHECK_NOTHROW(ExponentPair(2.0, 2.0));
  CHECK_NOTHROW(ExponentPair(2.0, 5.0));
  CHECK_THROWS_AS(ExponentPair(1.5, 3.0), std::invalid_argument);
  CHECK_THROWS_AS(ExponentPair(3.0, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(ExponentPair(2.0, std::nan("")), std::invalid_argument);

  CHECK_NOTHROW(RegularizationParams(0.0, 0.0));
  CHECK_NOTHROW(RegularizationParams(1e-3, 0.5));
  CHECK_THROWS_AS(RegularizationParams(-1e-3, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(RegularizationParams(0.0, -0.1), std::invalid_argument);
}

TEST_CASE("p_flux: identity at p=2, odd, monotone, matches pow") {
  CHECK(p_flux(0.7, 2.0) == doctest::Approx(0.7).epsilon(1e-15));
  CHECK(p_flux(-1.3, 2.0) == doctest::Approx(-1.3).epsilon(1e-15));
  CHECK(p_flux(0.0, 3.7) == 0.0);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> dist(-3.0, 3.0);
  for (int k = 0; k < 200; ++k) {
    const double t = dist(rng);
    for (double p : {2.0, 2.5, 3.0, 4.0, 5.0}) {
      const double want =
          std::copysign(std::pow(std::fabs(t), p - 1.0), t);
      CHECK(p_flux(t, p) == doctest::Approx(want).epsilon(1e-13));
      CHECK(p_flux(-t, p) == doctest::Approx(-p_flux(t, p)).epsilon(1e-13));
    }
  }
  // Monotone nondecreasing on a sample ladder.
  for (double p : {2.0, 3.0, 4.5}) {
    double prev = p_flux(-2.0, p);
    for (double t = -1.9; t <= 2.0; t += 0.1) {
      CHECK(p_flux(t, p) >= prev);
      prev = p_flux(t, p);
    }
  }
}

TEST_CASE("p_inequality_gap is nonnegative and vanishes at p=2") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> dist(-4.0, 4.0);
  for (int k = 0; k < 2000; ++k) {
    const double a = dist(rng), b = dist(rng);
    for (double p : {2.0, 2.2, 3.0, 4.0, 5.0, 7.0}) {
      const double gap = p_inequality_gap(a, b, p);
      CHECK(gap >= -1e-12 * (1.0 + std::pow(std::fabs(a) + std::fabs(b), p)));
    }
    CHECK(std::fabs(p_inequality_gap(a, b, 2.0)) <= 1e-12);
  }
}

TEST_CASE("energy matches the independent reference assembly") {
  const Grid g({-0.5, 0.25}, 1.0, 1.0, 13, 13);
  const struct {
    double p1, p2, eps, sigma;
  } tuples[] = {
      {2.0, 2.0, 0.0, 0.0}, {2.0, 4.0, 1e-3, 0.0},  {3.0, 3.0, 1e-2, 0.2},
      {2.0, 5.0, 0.0, 1.0}, {2.5, 3.5, 1e-4, 0.05},
  };
  for (unsigned s = 0; s < 3; ++s) {
    const ScalarField u = random_field(g, 100 + s);
    for (const auto& t : tuples) {
      const ExponentPair e(t.p1, t.p2);
      const RegularizationParams reg(t.eps, t.sigma);
      const double got = energy(u, e, reg);
      const double want = energy_reference(u, e, reg);
      CHECK(got == doctest::Approx(want).epsilon(1e-12));
    }
  }
}

TEST_CASE("p=2 energy equals the closed quadratic form") {
  const Grid g({0, 0}, 1.0, 1.0, 9, 9);
  const ScalarField u = random_field(g, 42);
  const CellGradientField gf = discrete_gradient(u);
  double acc = 0.0;
  for (std::size_t k = 0; k < gf.g1.values().size(); ++k)
    acc += 0.5 * (gf.g1.values()[k] * gf.g1.values()[k] +
                  gf.g2.values()[k] * gf.g2.values()[k]);
  acc *= g.h() * g.h();
  CHECK(energy(u, ExponentPair(2, 2), RegularizationParams(0, 0)) ==
        doctest::Approx(acc).epsilon(1e-13));
}

TEST_CASE("residual is the exact gradient of the energy") {
  const Grid g({0, 0}, 1.0, 1.0, 11, 11);
  const struct {
    double p1, p2, eps, sigma;
  } tuples[] = {
      {2.0, 2.0, 0.0, 0.0}, {2.0, 4.0, 1e-3, 0.0}, {3.0, 3.0, 1e-2, 0.3},
      {2.0, 3.5, 1e-4, 1.0},
  };
  for (const auto& t : tuples) {
    const ExponentPair e(t.p1, t.p2);
    const RegularizationParams reg(t.eps, t.sigma);
    // Smooth base field keeps |g| away from the p<4 kink at zero gradient.
    const Grid& gg = g;
    ScalarField u = sample_nodal(gg, [](Point q) {
      return q.x1 + 0.8 * q.x2 +
             0.3 * std::sin(3.1 * q.x1) * std::cos(2.7 * q.x2);
    });
    const ScalarField r = residual(u, e, reg);

    // Boundary rows are identically zero.
    for (int i = 0; i < g.nx(); ++i) {
      CHECK(r.at(i, 0) == 0.0);
      CHECK(r.at(i, g.ny() - 1) == 0.0);
    }
    for (int j = 0; j < g.ny(); ++j) {
      CHECK(r.at(0, j) == 0.0);
      CHECK(r.at(g.nx() - 1, j) == 0.0);
    }

    for (unsigned s = 0; s < 10; ++s) {
      const ScalarField v = random_interior_direction(g, 500 + s);
      const double t0 = 1e-6;
      ScalarField up = u, um = u;
      for (std::size_t k = 0; k < up.values().size(); ++k) {
        up.values()[k] += t0 * v.values()[k];
        um.values()[k] -= t0 * v.values()[k];
      }
      const double fd = (energy(up, e, reg) - energy(um, e, reg)) / (2 * t0);
      const double an = inner(r, v);
      CHECK(std::fabs(fd - an) <=
            1e-6 * std::max({std::fabs(fd), std::fabs(an), 1e-8}));
    }
  }
}

TEST_CASE("hessian_apply matches finite differences of the residual") {
  const Grid g({0, 0}, 1.0, 1.0, 9, 9);
  const ExponentPair e(2.0, 4.0);
  const RegularizationParams reg(1e-2, 0.1);
  const ScalarField u = sample_nodal(g, [](Point q) {
    return q.x1 + q.x2 + 0.2 * std::sin(2.0 * q.x1 + 1.0) * std::cos(q.x2);
  });

  const CellGradientField gf = discrete_gradient(u);
  std::vector<double> c1, c2;
  hessian_coeffs(gf, e, reg, &c1, &c2);
  REQUIRE(c1.size() == g.cell_count());
  REQUIRE(c2.size() == g.cell_count());
  for (double c : c1) CHECK(c >= 0.0);
  for (double c : c2) CHECK(c >= 0.0);

  std::vector<double> y(g.node_count()), g1s(g.cell_count()),
      g2s(g.cell_count());
  for (unsigned s = 0; s < 6; ++s) {
    const ScalarField v = random_interior_direction(g, 900 + s);
    hessian_apply(g, c1, c2, v.values(), &y, &g1s, &g2s);

    const double t0 = 1e-6;
    ScalarField up = u, um = u;
    for (std::size_t k = 0; k < up.values().size(); ++k) {
      up.values()[k] += t0 * v.values()[k];
      um.values()[k] -= t0 * v.values()[k];
    }
    const ScalarField rp = residual(up, e, reg);
    const ScalarField rm = residual(um, e, reg);
    double scale = 0.0;
    for (double w : y) scale = std::max(scale, std::fabs(w));
    for (std::size_t k = 0; k < y.size(); ++k) {
      const double fd = (rp.values()[k] - rm.values()[k]) / (2 * t0);
      CHECK(std::fabs(fd - y[k]) <= 1e-5 * std::max(scale, 1e-6));
    }
  }

  SUBCASE("diagonal agrees with unit-vector applications") {
    const std::vector<double> diag = hessian_diag(g, c1, c2);
    REQUIRE(diag.size() == g.node_count());
    std::vector<double> ev(g.node_count(), 0.0);
    for (auto [i, j] : {std::pair{1, 1}, {4, 4}, {2, 6}, {7, 3}}) {
      const std::size_t n = g.node_index(i, j);
      ev.assign(g.node_count(), 0.0);
      ev[n] = 1.0;
      hessian_apply(g, c1, c2, ev, &y, &g1s, &g2s);
      CHECK(y[n] == doctest::Approx(diag[n]).epsilon(1e-12));
    }
    // Boundary diagonal entries are 1 (safe Jacobi divisor).
    CHECK(diag[g.node_index(0, 3)] == 1.0);
    CHECK(diag[g.node_index(5, g.ny() - 1)] == 1.0);
  }
}

TEST_CASE("energy is convex along interior segments") {
  const Grid g({0, 0}, 1.0, 1.0, 9, 9);
  const ExponentPair e(2.0, 4.0);
  const RegularizationParams reg(0.0, 0.4);
  for (unsigned s = 0; s < 20; ++s) {
    ScalarField a = random_field(g, 2000 + s);
    ScalarField b = a;
    const ScalarField d = random_interior_direction(g, 3000 + s);
    for (std::size_t k = 0; k < b.values().size(); ++k)
      b.values()[k] += d.values()[k];  // same boundary trace as a
    ScalarField mid = a;
    for (std::size_t k = 0; k < mid.values().size(); ++k)
      mid.values()[k] = 0.5 * (a.values()[k] + b.values()[k]);
    const double ea = energy(a, e, reg), eb = energy(b, e, reg),
                 em = energy(mid, e, reg);
    CHECK(em <= 0.5 * (ea + eb) + 1e-12 * std::max(1.0, std::fabs(ea + eb)));
  }
}

TEST_CASE("zero_boundary clears exactly the rim") {
  const Grid g({0, 0}, 1.5, 1.0, 7, 5);
  std::vector<double> v(g.node_count(), 2.5);
  zero_boundary(g, &v);
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) {
      if (g.is_boundary(i, j))
        CHECK(v[g.node_index(i, j)] == 0.0);
      else
        CHECK(v[g.node_index(i, j)] == 2.5);
    }
}
