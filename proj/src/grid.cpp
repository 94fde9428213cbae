#include "plap/grid.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

#include "json.hpp"
#include "plap/kernels.hpp"

namespace plap {
namespace {

// Slack used for "is this point still inside" decisions; absorbs round-off
// from trigonometric circle points that land a few ulp outside.
double rim_tol(const Grid& g) { return 1e-9 * g.h(); }

std::string g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Locate q in the lattice spanned by `n` samples starting at x0 with step h:
// returns the lower sample index (clamped to [0, n-2]) and the local
// coordinate in [0,1]. Assumes q is inside or within the rim slack.
void locate(double q, double x0, double h, int n, int* idx, double* s) {
  double t = (q - x0) / h;
  t = std::clamp(t, 0.0, static_cast<double>(n - 1));
  int i = static_cast<int>(t);
  i = std::min(i, n - 2);
  *idx = i;
  *s = t - i;
}

}  // namespace

Grid::Grid(Point origin, double lx, double ly, int nx, int ny)
    : origin_(origin), lx_(lx), ly_(ly), nx_(nx), ny_(ny) {
  if (nx < 3 || ny < 3)
    throw std::invalid_argument("grid: need nx >= 3 and ny >= 3, got nx=" +
                                std::to_string(nx) +
                                " ny=" + std::to_string(ny));
  if (!(lx > 0.0) || !(ly > 0.0))
    throw std::invalid_argument("grid: extent must be positive, got lx=" +
                                g17(lx) + " ly=" + g17(ly));
  const double hx = lx / (nx - 1);
  const double hy = ly / (ny - 1);
  if (std::fabs(hx - hy) > 1e-12 * std::max(hx, hy))
    throw std::invalid_argument(
        "grid: spacing must be equal in both axes, got hx=" + g17(hx) +
        " hy=" + g17(hy));
  h_ = hx;
}

bool Grid::contains(Point q, double tol) const {
  return q.x1 >= origin_.x1 - tol && q.x1 <= origin_.x1 + lx_ + tol &&
         q.x2 >= origin_.x2 - tol && q.x2 <= origin_.x2 + ly_ + tol;
}

bool Grid::same_layout(const Grid& o) const {
  return origin_.x1 == o.origin_.x1 && origin_.x2 == o.origin_.x2 &&
         lx_ == o.lx_ && ly_ == o.ly_ && nx_ == o.nx_ && ny_ == o.ny_;
}

Grid build_grid(Point origin, double lx, double ly, int nx, int ny) {
  return Grid(origin, lx, ly, nx, ny);
}

ScalarField::ScalarField(const Grid& g) : grid_(g), v_(g.node_count(), 0.0) {}

ScalarField::ScalarField(const Grid& g, std::vector<double> values)
    : grid_(g), v_(std::move(values)) {
  if (v_.size() != g.node_count())
    throw std::invalid_argument("scalar field: expected " +
                                std::to_string(g.node_count()) +
                                " nodal values, got " +
                                std::to_string(v_.size()));
}

double ScalarField::eval(Point q) const {
  if (!grid_.contains(q, rim_tol(grid_)))
    throw std::out_of_range("interpolate: point (" + g17(q.x1) + ", " +
                            g17(q.x2) + ") is outside the grid rectangle");
  int i, j;
  double s, t;
  locate(q.x1, grid_.origin().x1, grid_.h(), grid_.nx(), &i, &s);
  locate(q.x2, grid_.origin().x2, grid_.h(), grid_.ny(), &j, &t);
  const double u00 = at(i, j), u10 = at(i + 1, j);
  const double u01 = at(i, j + 1), u11 = at(i + 1, j + 1);
  return (1.0 - t) * ((1.0 - s) * u00 + s * u10) +
         t * ((1.0 - s) * u01 + s * u11);
}

CellField::CellField(const Grid& g) : grid_(g), v_(g.cell_count(), 0.0) {}

CellField::CellField(const Grid& g, std::vector<double> values)
    : grid_(g), v_(std::move(values)) {
  if (v_.size() != g.cell_count())
    throw std::invalid_argument("cell field: expected " +
                                std::to_string(g.cell_count()) +
                                " cell values, got " +
                                std::to_string(v_.size()));
}

double CellField::eval(Point q) const {
  if (!grid_.contains(q, rim_tol(grid_)))
    throw std::out_of_range("interpolate: point (" + g17(q.x1) + ", " +
                            g17(q.x2) + ") is outside the grid rectangle");
  // Cell-center lattice: first center half a cell in from the origin.
  const double h = grid_.h();
  int ci, cj;
  double s, t;
  locate(q.x1, grid_.origin().x1 + 0.5 * h, h, grid_.ncx(), &ci, &s);
  locate(q.x2, grid_.origin().x2 + 0.5 * h, h, grid_.ncy(), &cj, &t);
  const double f00 = at(ci, cj), f10 = at(ci + 1, cj);
  const double f01 = at(ci, cj + 1), f11 = at(ci + 1, cj + 1);
  return (1.0 - t) * ((1.0 - s) * f00 + s * f10) +
         t * ((1.0 - s) * f01 + s * f11);
}

void require_disk_inside(const Grid& g, const DiskSpec& d) {
  if (!(d.r > 0.0))
    throw std::invalid_argument("disk: radius must be positive, got r=" +
                                g17(d.r));
  const double tol = rim_tol(g);
  const Point o = g.origin();
  if (d.center.x1 - d.r < o.x1 - tol || d.center.x1 + d.r > o.x1 + g.lx() + tol ||
      d.center.x2 - d.r < o.x2 - tol || d.center.x2 + d.r > o.x2 + g.ly() + tol)
    throw std::invalid_argument(
        "disk: closed disk with center (" + g17(d.center.x1) + ", " +
        g17(d.center.x2) + ") and r=" + g17(d.r) +
        " does not fit inside the grid rectangle");
}

CellGradientField discrete_gradient(const ScalarField& u) {
  const Grid& g = u.grid();
  CellField g1(g), g2(g);
  kernels::ops().cell_gradient(u.values().data(), g.nx(), g.ny(),
                               1.0 / (2.0 * g.h()), g1.values().data(),
                               g2.values().data());
  return {std::move(g1), std::move(g2)};
}

double interpolate(const ScalarField& u, Point q) { return u.eval(q); }

namespace detail {
void require_circle_args(const Grid& g, const DiskSpec& d, int m) {
  require_disk_inside(g, d);
  if (m < 4)
    throw std::invalid_argument("sample_circle: need m >= 4, got m=" +
                                std::to_string(m));
}
}  // namespace detail

double disk_integral(const CellField& f, const DiskSpec& d) {
  const Grid& g = f.grid();
  require_disk_inside(g, d);
  // Tiny relative slack so radii chosen to hit centers exactly stay inside.
  const double r2 = d.r * d.r * (1.0 + 1e-12);
  double acc = 0.0;
  for (int cj = 0; cj < g.ncy(); ++cj) {
    for (int ci = 0; ci < g.ncx(); ++ci) {
      const Point c = g.cell_center(ci, cj);
      const double dx = c.x1 - d.center.x1, dy = c.x2 - d.center.x2;
      if (dx * dx + dy * dy <= r2) acc += f.at(ci, cj);
    }
  }
  return acc * g.h() * g.h();
}

ScalarField cell_to_node(const CellField& f) {
  const Grid& g = f.grid();
  ScalarField out(g);
  for (int j = 0; j < g.ny(); ++j) {
    const int cj0 = std::max(j - 1, 0), cj1 = std::min(j, g.ncy() - 1);
    for (int i = 0; i < g.nx(); ++i) {
      const int ci0 = std::max(i - 1, 0), ci1 = std::min(i, g.ncx() - 1);
      double acc = 0.0;
      int cnt = 0;
      for (int cj = cj0; cj <= cj1; ++cj)
        for (int ci = ci0; ci <= ci1; ++ci) {
          acc += f.at(ci, cj);
          ++cnt;
        }
      out.at(i, j) = acc / cnt;
    }
  }
  return out;
}

std::string field_csv(const ScalarField& u) {
  const Grid& g = u.grid();
  std::string out = "i,j,x1,x2,value\n";
  out.reserve(out.size() + 64 * g.node_count());
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) {
      out += std::to_string(i);
      out += ',';
      out += std::to_string(j);
      out += ',';
      out += g17(g.x1(i));
      out += ',';
      out += g17(g.x2(j));
      out += ',';
      out += g17(u.at(i, j));
      out += '\n';
    }
  return out;
}

std::string grid_json(const Grid& g) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["origin"] = {g.origin().x1, g.origin().x2};
  j["extent"] = {g.lx(), g.ly()};
  j["n"] = {g.nx(), g.ny()};
  j["h"] = g.h();
  return j.dump(2);
}

}  // namespace plap
