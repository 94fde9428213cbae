#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdlib>
#include <random>
#include <sstream>
#include <stdexcept>

#include "doctest.h"
#include "plap/grid.hpp"

using namespace plap;

TEST_CASE("grid construction validates its arguments") {
  CHECK_THROWS_AS(Grid({0, 0}, 1.0, 1.0, 2, 5), std::invalid_argument);
  CHECK_THROWS_AS(Grid({0, 0}, 1.0, 1.0, 5, 2), std::invalid_argument);
  CHECK_THROWS_AS(Grid({0, 0}, 0.0, 1.0, 5, 5), std::invalid_argument);
  CHECK_THROWS_AS(Grid({0, 0}, -1.0, 1.0, 5, 5), std::invalid_argument);
  // Unequal spacing between the axes is rejected.
  CHECK_THROWS_AS(Grid({0, 0}, 1.0, 2.0, 5, 5), std::invalid_argument);
  // ...while a consistent rectangle is fine.
  CHECK_NOTHROW(Grid({0, 0}, 1.0, 2.0, 5, 9));
}

TEST_CASE("grid geometry and indexing") {
  const Grid g({-1.0, 2.0}, 2.0, 1.0, 9, 5);
  CHECK(g.h() == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(g.nx() == 9);
  CHECK(g.ny() == 5);
  CHECK(g.ncx() == 8);
  CHECK(g.ncy() == 4);
  CHECK(g.node_count() == 45);
  CHECK(g.cell_count() == 32);

  CHECK(g.x1(0) == -1.0);
  CHECK(g.x1(8) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(g.x2(4) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(g.cell_center(0, 0).x1 == doctest::Approx(-0.875));
  CHECK(g.cell_center(0, 0).x2 == doctest::Approx(2.125));

  CHECK(g.node_index(0, 0) == 0);
  CHECK(g.node_index(8, 0) == 8);
  CHECK(g.node_index(0, 1) == 9);
  CHECK(g.cell_index(0, 1) == 8);

  CHECK(g.is_boundary(0, 2));
  CHECK(g.is_boundary(3, 0));
  CHECK(g.is_boundary(8, 4));
  CHECK_FALSE(g.is_boundary(3, 2));

  CHECK(g.contains({0.0, 2.5}));
  CHECK(g.contains({-1.0, 2.0}));
  CHECK_FALSE(g.contains({-1.001, 2.5}));
  CHECK(g.contains({-1.001, 2.5}, 0.01));

  CHECK(g.same_layout(Grid({-1.0, 2.0}, 2.0, 1.0, 9, 5)));
  CHECK_FALSE(g.same_layout(Grid({0.0, 2.0}, 2.0, 1.0, 9, 5)));
}

TEST_CASE("bilinear nodal interpolation is exact on a + b*x1 + c*x2 + d*x1*x2") {
  const Grid g({0.25, -0.5}, 1.5, 1.5, 7, 7);
  const double a = 0.3, b = -1.2, c = 0.7, d = 2.1;
  const auto f = [&](Point q) {
    return a + b * q.x1 + c * q.x2 + d * q.x1 * q.x2;
  };
  const ScalarField u = sample_nodal(g, f);

  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> dx(0.25, 1.75), dy(-0.5, 1.0);
  for (int k = 0; k < 200; ++k) {
    const Point q{dx(rng), dy(rng)};
    CHECK(u.eval(q) == doctest::Approx(f(q)).epsilon(1e-12));
  }
  // Nodes and cell corners are reproduced exactly.
  CHECK(u.eval(g.node(3, 4)) == doctest::Approx(f(g.node(3, 4))).epsilon(1e-15));
  // Points outside the rectangle are rejected.
  CHECK_THROWS_AS(u.eval({0.0, 0.0}), std::out_of_range);
  CHECK_THROWS_AS(u.eval({1.0, 1.1}), std::out_of_range);
}

TEST_CASE("cell-field interpolation clamps at the rim") {
  const Grid g({0, 0}, 1.0, 1.0, 5, 5);
  CellField f(g);
  for (int cj = 0; cj < g.ncy(); ++cj)
    for (int ci = 0; ci < g.ncx(); ++ci)
      f.at(ci, cj) = 10.0 * ci + cj;

  // Exact at cell centers.
  CHECK(f.eval(g.cell_center(2, 1)) == doctest::Approx(21.0).epsilon(1e-14));
  // Beyond the outermost centers the value continues as a constant.
  CHECK(f.eval({0.0, 0.0}) == doctest::Approx(f.at(0, 0)).epsilon(1e-14));
  CHECK(f.eval({1.0, 1.0}) == doctest::Approx(f.at(3, 3)).epsilon(1e-14));
  CHECK(f.eval({0.0, 0.5}) ==
        doctest::Approx(0.5 * (f.at(0, 1) + f.at(0, 2))).epsilon(1e-14));
}

TEST_CASE("discrete gradient is exact on affine and bilinear fields") {
  const Grid g({-1, -1}, 2.0, 2.0, 17, 17);

  SUBCASE("affine") {
    const ScalarField u =
        sample_nodal(g, [](Point q) { return 0.4 - 1.7 * q.x1 + 0.9 * q.x2; });
    const CellGradientField gf = discrete_gradient(u);
    for (int cj = 0; cj < g.ncy(); ++cj)
      for (int ci = 0; ci < g.ncx(); ++ci) {
        CHECK(gf.g1.at(ci, cj) == doctest::Approx(-1.7).epsilon(1e-12));
        CHECK(gf.g2.at(ci, cj) == doctest::Approx(0.9).epsilon(1e-12));
      }
  }

  SUBCASE("bilinear x1*x2: gradients evaluate at cell centers") {
    const ScalarField u = sample_nodal(g, [](Point q) { return q.x1 * q.x2; });
    const CellGradientField gf = discrete_gradient(u);
    for (int cj = 0; cj < g.ncy(); ++cj)
      for (int ci = 0; ci < g.ncx(); ++ci) {
        const Point c = g.cell_center(ci, cj);
        CHECK(gf.g1.at(ci, cj) == doctest::Approx(c.x2).epsilon(1e-12));
        CHECK(gf.g2.at(ci, cj) == doctest::Approx(c.x1).epsilon(1e-12));
      }
  }

  SUBCASE("quadratic x1^2: gradient exact at cell-center abscissa") {
    const ScalarField u =
        sample_nodal(g, [](Point q) { return q.x1 * q.x1; });
    const CellGradientField gf = discrete_gradient(u);
    for (int cj = 0; cj < g.ncy(); ++cj)
      for (int ci = 0; ci < g.ncx(); ++ci) {
        const Point c = g.cell_center(ci, cj);
        CHECK(gf.g1.at(ci, cj) == doctest::Approx(2.0 * c.x1).epsilon(1e-12));
        CHECK(gf.g2.at(ci, cj) == doctest::Approx(0.0).epsilon(1e-12));
      }
  }
}

TEST_CASE("disk predicates and circle sampling") {
  const Grid g({0, 0}, 1.0, 1.0, 33, 33);

  CHECK_NOTHROW(require_disk_inside(g, {{0.5, 0.5}, 0.5}));
  CHECK_THROWS_AS(require_disk_inside(g, {{0.5, 0.5}, 0.51}),
                  std::invalid_argument);
  CHECK_THROWS_AS(require_disk_inside(g, {{0.9, 0.5}, 0.2}),
                  std::invalid_argument);
  CHECK_THROWS_AS(require_disk_inside(g, {{0.5, 0.5}, 0.0}),
                  std::invalid_argument);

  const ScalarField u = sample_nodal(g, [](Point q) { return q.x1; });
  const DiskSpec d{{0.5, 0.5}, 0.25};
  const auto vals = sample_circle(u, d, 8);
  REQUIRE(vals.size() == 8);
  // Angle 0 is sampled first; x1 is affine so interpolation is exact.
  CHECK(vals[0] == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(vals[4] == doctest::Approx(0.25).epsilon(1e-12));
  CHECK_THROWS_AS(sample_circle(u, d, 3), std::invalid_argument);
  // A circle poking outside the rectangle is rejected up front.
  CHECK_THROWS_AS(sample_circle(u, DiskSpec{{0.95, 0.5}, 0.2}, 16),
                  std::invalid_argument);
}

TEST_CASE("disk integral converges to the continuous integral") {
  const DiskSpec d{{0.5, 0.5}, 0.3};
  const double pi = 3.14159265358979323846;

  double err_coarse = 0.0, err_fine = 0.0;
  {
    const Grid g({0, 0}, 1.0, 1.0, 65, 65);
    const CellField one = sample_cells(g, [](Point) { return 1.0; });
    err_coarse = std::fabs(disk_integral(one, d) - pi * d.r * d.r);
  }
  {
    const Grid g({0, 0}, 1.0, 1.0, 257, 257);
    const CellField one = sample_cells(g, [](Point) { return 1.0; });
    err_fine = std::fabs(disk_integral(one, d) - pi * d.r * d.r);
  }
  CHECK(err_coarse < 0.05 * pi * d.r * d.r);
  CHECK(err_fine < 0.01 * pi * d.r * d.r);
  CHECK(err_fine < err_coarse);

  // Linear integrand over a centered disk: exact value 0 by symmetry, the
  // midpoint rule preserves the cancellation up to boundary-cell noise.
  const Grid g({0, 0}, 1.0, 1.0, 129, 129);
  const CellField lin = sample_cells(g, [](Point q) { return q.x1 - 0.5; });
  CHECK(std::fabs(disk_integral(lin, d)) < 1e-12);
}

TEST_CASE("cell-to-node averaging") {
  const Grid g({0, 0}, 1.0, 1.0, 9, 9);

  // Constant fields are preserved everywhere, including the rim.
  const ScalarField c = cell_to_node(sample_cells(g, [](Point) { return 3.5; }));
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i)
      CHECK(c.at(i, j) == doctest::Approx(3.5).epsilon(1e-15));

  // Linear fields are recovered exactly at interior nodes (the +-h/2
  // cell-center offsets cancel), and with the half-cell bias at the rim.
  const ScalarField lin =
      cell_to_node(sample_cells(g, [](Point q) { return q.x1; }));
  for (int j = 1; j < g.ny() - 1; ++j)
    for (int i = 1; i < g.nx() - 1; ++i)
      CHECK(lin.at(i, j) == doctest::Approx(g.x1(i)).epsilon(1e-13));
  CHECK(lin.at(0, 4) == doctest::Approx(g.h() / 2).epsilon(1e-13));
  CHECK(lin.at(8, 4) == doctest::Approx(1.0 - g.h() / 2).epsilon(1e-13));
}

TEST_CASE("field CSV round-trips node values exactly") {
  const Grid g({0, 0}, 1.0, 1.0, 3, 3);
  ScalarField u(g);
  u.at(0, 0) = 1.0 / 3.0;
  u.at(1, 0) = -0.1;
  u.at(2, 0) = 1e-17;
  u.at(1, 1) = 123456.789012345678;

  const std::string csv = field_csv(u);
  std::istringstream in(csv);
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line == "i,j,x1,x2,value");

  int rows = 0;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tok;
    std::getline(ls, tok, ',');
    const int i = std::atoi(tok.c_str());
    std::getline(ls, tok, ',');
    const int j = std::atoi(tok.c_str());
    std::getline(ls, tok, ',');  // x1
    std::getline(ls, tok, ',');  // x2
    std::getline(ls, tok, ',');  // value
    const double v = std::strtod(tok.c_str(), nullptr);
    CHECK(v == u.at(i, j));  // %.17g is bit round-trip exact
    ++rows;
  }
  CHECK(rows == 9);
}

TEST_CASE("grid JSON names the layout") {
  const Grid g({0.5, -1.0}, 1.0, 2.0, 5, 9);
  const std::string js = grid_json(g);
  CHECK(js.find("\"origin\"") != std::string::npos);
  CHECK(js.find("\"extent\"") != std::string::npos);
  CHECK(js.find("\"n\"") != std::string::npos);
  CHECK(js.find("\"h\"") != std::string::npos);
  CHECK(js.find("\"schema_version\"") != std::string::npos);
  CHECK(js.find("5") != std::string::npos);
  CHECK(js.find("9") != std::string::npos);
}
