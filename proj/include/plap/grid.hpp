#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

namespace plap {

struct Point {
  double x1 = 0.0;
  double x2 = 0.0;
};

/// Uniform node lattice over an axis-aligned rectangle, equal spacing in both
/// axes. Node (i,j), 0 <= i < nx, 0 <= j < ny, sits at
/// (origin.x1 + i*h, origin.x2 + j*h) and is stored row-major at j*nx + i.
/// Cells are indexed by their lower-left node: cell (ci,cj) at cj*(nx-1) + ci.
class Grid {
 public:
  /// Throws std::invalid_argument unless nx,ny >= 3, lx,ly > 0 and
  /// lx/(nx-1) == ly/(ny-1) to relative tolerance 1e-12.
  Grid(Point origin, double lx, double ly, int nx, int ny);

  Point origin() const { return origin_; }
  double lx() const { return lx_; }
  double ly() const { return ly_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double h() const { return h_; }

  int ncx() const { return nx_ - 1; }
  int ncy() const { return ny_ - 1; }
  std::size_t node_count() const {
    return static_cast<std::size_t>(nx_) * ny_;
  }
  std::size_t cell_count() const {
    return static_cast<std::size_t>(nx_ - 1) * (ny_ - 1);
  }

  double x1(int i) const { return origin_.x1 + i * h_; }
  double x2(int j) const { return origin_.x2 + j * h_; }
  Point node(int i, int j) const { return {x1(i), x2(j)}; }
  Point cell_center(int ci, int cj) const {
    return {origin_.x1 + (ci + 0.5) * h_, origin_.x2 + (cj + 0.5) * h_};
  }

  std::size_t node_index(int i, int j) const {
    return static_cast<std::size_t>(j) * nx_ + i;
  }
  std::size_t cell_index(int ci, int cj) const {
    return static_cast<std::size_t>(cj) * (nx_ - 1) + ci;
  }

  bool is_boundary(int i, int j) const {
    return i == 0 || j == 0 || i == nx_ - 1 || j == ny_ - 1;
  }

  /// Closed-rectangle membership with an absolute slack of tol.
  bool contains(Point q, double tol = 0.0) const;

  bool same_layout(const Grid& o) const;

 private:
  Point origin_;
  double lx_ = 0.0, ly_ = 0.0, h_ = 0.0;
  int nx_ = 0, ny_ = 0;
};

Grid build_grid(Point origin, double lx, double ly, int nx, int ny);

/// Nodal values on a grid. Evaluation is bilinear over the containing cell,
/// so fields of the form a + b*x1 + c*x2 + d*x1*x2 are reproduced exactly
/// per cell. eval throws std::out_of_range for points outside the rectangle
/// (beyond a 1e-9*h slack that absorbs round-off from circle sampling).
class ScalarField {
 public:
  explicit ScalarField(const Grid& g);
  ScalarField(const Grid& g, std::vector<double> values);

  const Grid& grid() const { return grid_; }
  const std::vector<double>& values() const { return v_; }
  std::vector<double>& values() { return v_; }

  double at(int i, int j) const { return v_[grid_.node_index(i, j)]; }
  double& at(int i, int j) { return v_[grid_.node_index(i, j)]; }

  double eval(Point q) const;

 private:
  Grid grid_;
  std::vector<double> v_;
};

/// Per-cell values interpreted as samples on the cell-center lattice.
/// Evaluation is bilinear between centers with half-cell clamping at the rim
/// (constant continuation), so it is defined on the whole rectangle.
class CellField {
 public:
  explicit CellField(const Grid& g);
  CellField(const Grid& g, std::vector<double> values);

  const Grid& grid() const { return grid_; }
  const std::vector<double>& values() const { return v_; }
  std::vector<double>& values() { return v_; }

  double at(int ci, int cj) const { return v_[grid_.cell_index(ci, cj)]; }
  double& at(int ci, int cj) { return v_[grid_.cell_index(ci, cj)]; }

  double eval(Point q) const;

 private:
  Grid grid_;
  std::vector<double> v_;
};

/// Per-cell discrete gradient (u_x1, u_x2); produce with discrete_gradient.
struct CellGradientField {
  CellField g1;
  CellField g2;
  const Grid& grid() const { return g1.grid(); }
};

struct DiskSpec {
  Point center;
  double r = 0.0;
};

/// Throws std::invalid_argument unless r > 0 and the closed disk lies inside
/// the grid rectangle (to 1e-9*h slack).
void require_disk_inside(const Grid& g, const DiskSpec& d);

/// Two-difference cell gradient:
///   g1 = (u10 - u00 + u11 - u01)/(2h),  g2 = (u01 - u00 + u11 - u10)/(2h).
/// Linear in u and exact on affine fields.
CellGradientField discrete_gradient(const ScalarField& u);

/// Bilinear interpolation; same contract as ScalarField::eval.
double interpolate(const ScalarField& u, Point q);

/// Field values at m equispaced angles on the circle of radius d.r, starting
/// at angle 0 and proceeding counterclockwise. Requires m >= 4.
template <class Field>
std::vector<double> sample_circle(const Field& f, const DiskSpec& d, int m);

/// Midpoint quadrature restricted to the disk: sum of f(cell)*h^2 over cells
/// whose center lies in the closed disk.
double disk_integral(const CellField& f, const DiskSpec& d);

/// Nodal field obtained by averaging the adjacent cells of each node
/// (4 in the interior, 2 on edges, 1 at corners).
ScalarField cell_to_node(const CellField& f);

/// Nodal samples of a callable Point -> double.
template <class F>
ScalarField sample_nodal(const Grid& g, F&& f) {
  ScalarField out(g);
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) out.at(i, j) = f(g.node(i, j));
  return out;
}

/// Cell-center samples of a callable Point -> double.
template <class F>
CellField sample_cells(const Grid& g, F&& f) {
  CellField out(g);
  for (int cj = 0; cj < g.ncy(); ++cj)
    for (int ci = 0; ci < g.ncx(); ++ci)
      out.at(ci, cj) = f(g.cell_center(ci, cj));
  return out;
}

/// CSV with header "i,j,x1,x2,value", one row per node in storage order,
/// doubles rendered with %.17g (round-trip exact).
std::string field_csv(const ScalarField& u);

/// JSON object describing the grid (origin, extent, node counts, spacing).
std::string grid_json(const Grid& g);

// ---------------------------------------------------------------------------

namespace detail {
void require_circle_args(const Grid& g, const DiskSpec& d, int m);
}

template <class Field>
std::vector<double> sample_circle(const Field& f, const DiskSpec& d, int m) {
  detail::require_circle_args(f.grid(), d, m);
  std::vector<double> out;
  out.reserve(m);
  const double two_pi = 6.283185307179586476925286766559;
  for (int k = 0; k < m; ++k) {
    const double th = two_pi * k / m;
    out.push_back(f.eval({d.center.x1 + d.r * std::cos(th),
                          d.center.x2 + d.r * std::sin(th)}));
  }
  return out;
}

}  // namespace plap
