#include "nemel/grid.hpp"

#include <cmath>

namespace nemel {

Grid::Grid(int nx_, int ny_, double Lx_, double Ly_) : nx(nx_), ny(ny_), Lx(Lx_), Ly(Ly_) {
  if (nx < 4 || ny < 4) throw config_error("grid: nx and ny must be >= 4");
  if (!(Lx > 0.0) || !(Ly > 0.0)) throw config_error("grid: domain lengths must be positive");
  hx = Lx / nx;
  hy = Ly / ny;
}

namespace {

// Ghost value of a cell field one cell outside the wall, given the interior
// neighbor. Dirichlet0 reflects with sign flip, Neumann0/NoFlux mirror.
inline double ghost(double interior, BcKind bc) {
  return bc == BcKind::Dirichlet0 ? -interior : interior;
}

}  // namespace

void grad_cc(const Grid& g, const CellField& f, BcKind bc, FaceFieldX& gx, FaceFieldY& gy) {
  gx.a.assign(g.xfaces(), 0.0);
  gy.a.assign(g.yfaces(), 0.0);
  const int nx = g.nx, ny = g.ny;
  parallel_for(static_cast<std::size_t>(ny), [&](std::size_t jb, std::size_t je) {
    for (std::size_t j = jb; j < je; ++j) {
      for (int i = 0; i <= nx; ++i) {
        const double fl = i > 0 ? f[g.cidx(i - 1, j)] : ghost(f[g.cidx(0, j)], bc);
        const double fr = i < nx ? f[g.cidx(i, j)] : ghost(f[g.cidx(nx - 1, j)], bc);
        gx[g.xidx(i, j)] = (fr - fl) / g.hx;
      }
    }
  });
  parallel_for(static_cast<std::size_t>(ny) + 1, [&](std::size_t jb, std::size_t je) {
    for (std::size_t j = jb; j < je; ++j) {
      for (int i = 0; i < nx; ++i) {
        const double fl = j > 0 ? f[g.cidx(i, j - 1)] : ghost(f[g.cidx(i, 0)], bc);
        const double fr = static_cast<int>(j) < ny ? f[g.cidx(i, j)]
                                                   : ghost(f[g.cidx(i, ny - 1)], bc);
        gy[g.yidx(i, j)] = (fr - fl) / g.hy;
      }
    }
  });
}

CellField div_fc(const Grid& g, const FaceFieldX& fx, const FaceFieldY& fy) {
  CellField out(g);
  const int nx = g.nx;
  parallel_for(g.cells(), [&](std::size_t kb, std::size_t ke) {
    for (std::size_t k = kb; k < ke; ++k) {
      const int i = static_cast<int>(k % nx);
      const int j = static_cast<int>(k / nx);
      out[k] = (fx[g.xidx(i + 1, j)] - fx[g.xidx(i, j)]) / g.hx +
               (fy[g.yidx(i, j + 1)] - fy[g.yidx(i, j)]) / g.hy;
    }
  });
  return out;
}

CellField laplacian_cc(const Grid& g, const CellField& f, BcKind bc) {
  FaceFieldX gx;
  FaceFieldY gy;
  grad_cc(g, f, bc, gx, gy);
  return div_fc(g, gx, gy);
}

Kinematics strain_and_vorticity(const Grid& g, const FaceFieldX& u, const FaceFieldY& v,
                                FlowBc bc) {
  Kinematics kin(g);
  const int nx = g.nx, ny = g.ny;
  const double tang = bc == FlowBc::NoSlip ? -1.0 : 1.0;

  // Tangential ghosts: u rows outside y-walls, v columns outside x-walls.
  auto uat = [&](int i, int j) -> double {
    if (j < 0) return tang * u[g.xidx(i, 0)];
    if (j >= ny) return tang * u[g.xidx(i, ny - 1)];
    return u[g.xidx(i, j)];
  };
  auto vat = [&](int i, int j) -> double {
    if (i < 0) return tang * v[g.yidx(0, j)];
    if (i >= nx) return tang * v[g.yidx(nx - 1, j)];
    return v[g.yidx(i, j)];
  };

  parallel_for(g.cells(), [&](std::size_t kb, std::size_t ke) {
    for (std::size_t k = kb; k < ke; ++k) {
      const int i = static_cast<int>(k % nx);
      const int j = static_cast<int>(k / nx);
      const double dudx = (u[g.xidx(i + 1, j)] - u[g.xidx(i, j)]) / g.hx;
      const double dvdy = (v[g.yidx(i, j + 1)] - v[g.yidx(i, j)]) / g.hy;
      const double dudy = (uat(i, j + 1) - uat(i, j - 1) + uat(i + 1, j + 1) - uat(i + 1, j - 1)) /
                          (4.0 * g.hy);
      const double dvdx = (vat(i + 1, j) - vat(i - 1, j) + vat(i + 1, j + 1) - vat(i - 1, j + 1)) /
                          (4.0 * g.hx);
      kin.dxx[k] = dudx;
      kin.dyy[k] = dvdy;
      kin.dxy[k] = 0.5 * (dudy + dvdx);
      kin.w[k] = 0.5 * (dvdx - dudy);
    }
  });
  return kin;
}

CellVecField velocity_at_centers(const Grid& g, const FaceFieldX& u, const FaceFieldY& v) {
  CellVecField out(g);
  const int nx = g.nx;
  parallel_for(g.cells(), [&](std::size_t kb, std::size_t ke) {
    for (std::size_t k = kb; k < ke; ++k) {
      const int i = static_cast<int>(k % nx);
      const int j = static_cast<int>(k / nx);
      out.x[k] = 0.5 * (u[g.xidx(i, j)] + u[g.xidx(i + 1, j)]);
      out.y[k] = 0.5 * (v[g.yidx(i, j)] + v[g.yidx(i, j + 1)]);
    }
  });
  return out;
}

CellVecField cell_gradient(const Grid& g, const CellField& f, BcKind bc) {
  CellVecField out(g);
  const int nx = g.nx, ny = g.ny;
  auto fat = [&](int i, int j) -> double {
    double sign = 1.0;
    if (i < 0) {
      i = 0;
      if (bc == BcKind::Dirichlet0) sign = -sign;
    } else if (i >= nx) {
      i = nx - 1;
      if (bc == BcKind::Dirichlet0) sign = -sign;
    }
    if (j < 0) {
      j = 0;
      if (bc == BcKind::Dirichlet0) sign = -sign;
    } else if (j >= ny) {
      j = ny - 1;
      if (bc == BcKind::Dirichlet0) sign = -sign;
    }
    return sign * f[g.cidx(i, j)];
  };
  parallel_for(g.cells(), [&](std::size_t kb, std::size_t ke) {
    for (std::size_t k = kb; k < ke; ++k) {
      const int i = static_cast<int>(k % nx);
      const int j = static_cast<int>(k / nx);
      out.x[k] = (fat(i + 1, j) - fat(i - 1, j)) / (2.0 * g.hx);
      out.y[k] = (fat(i, j + 1) - fat(i, j - 1)) / (2.0 * g.hy);
    }
  });
  return out;
}

CellVecField cell_gradient_onesided(const Grid& g, const CellField& f) {
  CellVecField out(g);
  const int nx = g.nx, ny = g.ny;
  parallel_for(g.cells(), [&](std::size_t kb, std::size_t ke) {
    for (std::size_t k = kb; k < ke; ++k) {
      const int i = static_cast<int>(k % nx);
      const int j = static_cast<int>(k / nx);
      double gx, gy;
      if (i == 0) {
        gx = (-3.0 * f[g.cidx(0, j)] + 4.0 * f[g.cidx(1, j)] - f[g.cidx(2, j)]) / (2.0 * g.hx);
      } else if (i == nx - 1) {
        gx = (3.0 * f[g.cidx(nx - 1, j)] - 4.0 * f[g.cidx(nx - 2, j)] + f[g.cidx(nx - 3, j)]) /
             (2.0 * g.hx);
      } else {
        gx = (f[g.cidx(i + 1, j)] - f[g.cidx(i - 1, j)]) / (2.0 * g.hx);
      }
      if (j == 0) {
        gy = (-3.0 * f[g.cidx(i, 0)] + 4.0 * f[g.cidx(i, 1)] - f[g.cidx(i, 2)]) / (2.0 * g.hy);
      } else if (j == ny - 1) {
        gy = (3.0 * f[g.cidx(i, ny - 1)] - 4.0 * f[g.cidx(i, ny - 2)] + f[g.cidx(i, ny - 3)]) /
             (2.0 * g.hy);
      } else {
        gy = (f[g.cidx(i, j + 1)] - f[g.cidx(i, j - 1)]) / (2.0 * g.hy);
      }
      out.x[k] = gx;
      out.y[k] = gy;
    }
  });
  // Replace the wall-normal one-sided values by quadratic extrapolation of the
  // interior centered values: the Taylor error then varies smoothly across the
  // first cell ring, so divergences of gradient products stay second order
  // near walls. (One-sided stencils have a different error coefficient than
  // centered ones; the jump costs an order when differentiated.)
  if (nx >= 6) {
    for (int j = 0; j < ny; ++j) {
      out.x[g.cidx(0, j)] = 3.0 * out.x[g.cidx(1, j)] - 3.0 * out.x[g.cidx(2, j)] +
                            out.x[g.cidx(3, j)];
      out.x[g.cidx(nx - 1, j)] = 3.0 * out.x[g.cidx(nx - 2, j)] -
                                 3.0 * out.x[g.cidx(nx - 3, j)] + out.x[g.cidx(nx - 4, j)];
    }
  }
  if (ny >= 6) {
    for (int i = 0; i < nx; ++i) {
      out.y[g.cidx(i, 0)] = 3.0 * out.y[g.cidx(i, 1)] - 3.0 * out.y[g.cidx(i, 2)] +
                            out.y[g.cidx(i, 3)];
      out.y[g.cidx(i, ny - 1)] = 3.0 * out.y[g.cidx(i, ny - 2)] -
                                 3.0 * out.y[g.cidx(i, ny - 3)] + out.y[g.cidx(i, ny - 4)];
    }
  }
  return out;
}

double cell_sum(const Grid& g, const CellField& f) { return det_sum(f.a) * g.cell_volume(); }

double cell_max_abs(const CellField& f) { return det_max_abs(f.a); }

double cell_min(const CellField& f) { return det_min(f.a); }

double cell_l2(const Grid& g, const CellField& f) {
  double s = 0.0;
  for (double x : f.a) s += x * x;
  return std::sqrt(s * g.cell_volume());
}

}  // namespace nemel
