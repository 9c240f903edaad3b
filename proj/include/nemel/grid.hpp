#pragma once

#include <cstddef>
#include <vector>

#include "nemel/common.hpp"
#include "nemel/tensor.hpp"

namespace nemel {

/// Uniform rectangular MAC grid on (0,Lx) x (0,Ly). Scalars (c_k, d, phi, pi)
/// live at cell centers, u at x-faces, v at y-faces. Storage is row-major with
/// x fastest: index = j*stride + i.
struct Grid {
  int nx = 0;
  int ny = 0;
  double Lx = 1.0;
  double Ly = 1.0;
  double hx = 0.0;
  double hy = 0.0;

  Grid() = default;
  Grid(int nx_, int ny_, double Lx_, double Ly_);

  std::size_t cells() const { return static_cast<std::size_t>(nx) * ny; }
  std::size_t xfaces() const { return static_cast<std::size_t>(nx + 1) * ny; }
  std::size_t yfaces() const { return static_cast<std::size_t>(nx) * (ny + 1); }

  std::size_t cidx(int i, int j) const { return static_cast<std::size_t>(j) * nx + i; }
  std::size_t xidx(int i, int j) const { return static_cast<std::size_t>(j) * (nx + 1) + i; }
  std::size_t yidx(int i, int j) const { return static_cast<std::size_t>(j) * nx + i; }

  double xc(int i) const { return (i + 0.5) * hx; }
  double yc(int j) const { return (j + 0.5) * hy; }
  double xf(int i) const { return i * hx; }
  double yf(int j) const { return j * hy; }

  double cell_volume() const { return hx * hy; }
};

struct CellField {
  std::vector<double> a;
  CellField() = default;
  explicit CellField(const Grid& g, double fill = 0.0) : a(g.cells(), fill) {}
  double& operator[](std::size_t k) { return a[k]; }
  double operator[](std::size_t k) const { return a[k]; }
  std::size_t size() const { return a.size(); }
};

struct FaceFieldX {
  std::vector<double> a;
  FaceFieldX() = default;
  explicit FaceFieldX(const Grid& g, double fill = 0.0) : a(g.xfaces(), fill) {}
  double& operator[](std::size_t k) { return a[k]; }
  double operator[](std::size_t k) const { return a[k]; }
  std::size_t size() const { return a.size(); }
};

struct FaceFieldY {
  std::vector<double> a;
  FaceFieldY() = default;
  explicit FaceFieldY(const Grid& g, double fill = 0.0) : a(g.yfaces(), fill) {}
  double& operator[](std::size_t k) { return a[k]; }
  double operator[](std::size_t k) const { return a[k]; }
  std::size_t size() const { return a.size(); }
};

/// Two cell fields forming a vector per cell (director, cell-centered velocity, E-field).
struct CellVecField {
  CellField x;
  CellField y;
  CellVecField() = default;
  explicit CellVecField(const Grid& g) : x(g), y(g) {}
  Vec2 at(std::size_t k) const { return {x[k], y[k]}; }
  void set(std::size_t k, const Vec2& v) {
    x.a[k] = v.x;
    y.a[k] = v.y;
  }
};

/// Full 2x2 matrix per cell (stresses; not assumed symmetric).
struct CellMatField {
  CellField xx, xy, yx, yy;
  CellMatField() = default;
  explicit CellMatField(const Grid& g) : xx(g), xy(g), yx(g), yy(g) {}
  Mat2 at(std::size_t k) const { return {xx[k], xy[k], yx[k], yy[k]}; }
  void set(std::size_t k, const Mat2& m) {
    xx.a[k] = m.xx;
    xy.a[k] = m.xy;
    yx.a[k] = m.yx;
    yy.a[k] = m.yy;
  }
};

/// Ghost-cell conventions for cell-centered stencils.
///   Dirichlet0: ghost = -interior (odd reflection through the wall value 0)
///   Neumann0:   ghost = +interior (mirror)
///   NoFlux:     gradient stencils mirror; the drift part of the ion flux is
///               zeroed at boundary faces by the flux assembly itself.
enum class BcKind { Dirichlet0, Neumann0, NoFlux };

/// Velocity wall treatment: NoSlip is the production boundary condition,
/// FreeSlip exists for decoupled decay tests.
enum class FlowBc { NoSlip, FreeSlip };

/// Face-centered gradient of a cell field; boundary faces use the ghost
/// convention of `bc`.
void grad_cc(const Grid& g, const CellField& f, BcKind bc, FaceFieldX& gx, FaceFieldY& gy);

/// Conservative face-to-cell divergence.
CellField div_fc(const Grid& g, const FaceFieldX& fx, const FaceFieldY& fy);

/// 5-point Laplacian with ghost cells per bc.
CellField laplacian_cc(const Grid& g, const CellField& f, BcKind bc);

struct Kinematics {
  CellField dxx;  // D(v)_11
  CellField dxy;  // D(v)_12 = D(v)_21
  CellField dyy;  // D(v)_22
  CellField w;    // vorticity W = (dv/dx - du/dy)/2, so Omega(v)d = W*(-d2, d1)
  Kinematics() = default;
  explicit Kinematics(const Grid& g) : dxx(g), dxy(g), dyy(g), w(g) {}
  Mat2 strain(std::size_t k) const { return {dxx[k], dxy[k], dxy[k], dyy[k]}; }
};

/// Cell-centered strain and vorticity of a MAC velocity field.
Kinematics strain_and_vorticity(const Grid& g, const FaceFieldX& u, const FaceFieldY& v,
                                FlowBc bc = FlowBc::NoSlip);

/// Velocity interpolated to cell centers.
CellVecField velocity_at_centers(const Grid& g, const FaceFieldX& u, const FaceFieldY& v);

/// Cell-centered gradient by centered differences with ghost cells per bc.
CellVecField cell_gradient(const Grid& g, const CellField& f, BcKind bc);

/// Cell-centered gradient with no boundary-condition assumption: centered in
/// the interior, one-sided second order at boundary cells.
CellVecField cell_gradient_onesided(const Grid& g, const CellField& f);

// Deterministic field reductions.
double cell_sum(const Grid& g, const CellField& f);        // sum f * hx*hy
double cell_max_abs(const CellField& f);
double cell_min(const CellField& f);
double cell_l2(const Grid& g, const CellField& f);         // sqrt(sum f^2 * hx*hy)

}  // namespace nemel
