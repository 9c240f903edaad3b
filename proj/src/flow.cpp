#include "nemel/flow.hpp"

#include <cmath>

#include "nemel/poisson.hpp"

namespace nemel {

CellMatField ericksen_stress(const Grid& g, const CellVecField& d) {
  const CellVecField g1 = cell_gradient(g, d.x, BcKind::Neumann0);
  const CellVecField g2 = cell_gradient(g, d.y, BcKind::Neumann0);
  CellMatField out(g);
  parallel_for(g.cells(), [&](std::size_t kb, std::size_t ke) {
    for (std::size_t k = kb; k < ke; ++k) {
      // column i of grad d is (di d1, di d2)
      const Vec2 dx_d{g1.x[k], g2.x[k]};
      const Vec2 dy_d{g1.y[k], g2.y[k]};
      out.set(k, Mat2{dx_d.dot(dx_d), dx_d.dot(dy_d), dy_d.dot(dx_d), dy_d.dot(dy_d)});
    }
  });
  return out;
}

CellMatField electric_stress(const Grid& g, const CellField& phi, const CellVecField& d,
                             const Permittivity& perm) {
  const CellVecField e = efield(g, phi);
  CellMatField out(g);
  parallel_for(g.cells(), [&](std::size_t kb, std::size_t ke) {
    for (std::size_t k = kb; k < ke; ++k) {
      const Vec2 ek = e.at(k);
      Mat2 m = Mat2::outer(ek, ek);
      Mat2 epsd = epsilon_tensor(d.at(k), perm);
      // (grad phi x grad phi) eps(d): row-times-matrix product
      out.set(k, Mat2{m.xx * epsd.xx + m.xy * epsd.yx, m.xx * epsd.xy + m.xy * epsd.yy,
                      m.yx * epsd.xx + m.yy * epsd.yx, m.yx * epsd.xy + m.yy * epsd.yy});
    }
  });
  return out;
}

namespace {

// Quadratic extrapolation ghost for cell fields, O(h^3) for smooth data.
inline double quad_ghost(const Grid& g, const CellField& f, int i, int j) {
  auto clamp_get = [&](int ii, int jj) { return f[g.cidx(ii, jj)]; };
  if (i < 0) return 3.0 * clamp_get(0, j) - 3.0 * clamp_get(1, j) + clamp_get(2, j);
  if (i >= g.nx)
    return 3.0 * clamp_get(g.nx - 1, j) - 3.0 * clamp_get(g.nx - 2, j) + clamp_get(g.nx - 3, j);
  if (j < 0) return 3.0 * clamp_get(i, 0) - 3.0 * clamp_get(i, 1) + clamp_get(i, 2);
  if (j >= g.ny)
    return 3.0 * clamp_get(i, g.ny - 1) - 3.0 * clamp_get(i, g.ny - 2) + clamp_get(i, g.ny - 3);
  return f[g.cidx(i, j)];
}

// Row-wise divergence of a cell tensor field sampled at interior faces.
void divergence_to_faces(const Grid& g, const CellMatField& sigma, FaceFieldX& fx,
                         FaceFieldY& fy) {
  const int nx = g.nx, ny = g.ny;
  auto s = [&](const CellField& f, int i, int j) { return quad_ghost(g, f, i, j); };
  parallel_for(static_cast<std::size_t>(ny), [&](std::size_t jb, std::size_t je) {
    for (std::size_t jj = jb; jj < je; ++jj) {
      const int j = static_cast<int>(jj);
      for (int fi = 1; fi < nx; ++fi) {
        const double dsxx = (sigma.xx[g.cidx(fi, j)] - sigma.xx[g.cidx(fi - 1, j)]) / g.hx;
        const double dsxy = (s(sigma.xy, fi - 1, j + 1) + s(sigma.xy, fi, j + 1) -
                             s(sigma.xy, fi - 1, j - 1) - s(sigma.xy, fi, j - 1)) /
                            (4.0 * g.hy);
        fx[g.xidx(fi, j)] += dsxx + dsxy;
      }
    }
  });
  parallel_for(static_cast<std::size_t>(ny) - 1, [&](std::size_t jb, std::size_t je) {
    for (std::size_t jj = jb; jj < je; ++jj) {
      const int fj = static_cast<int>(jj) + 1;
      for (int i = 0; i < nx; ++i) {
        const double dsyy = (sigma.yy[g.cidx(i, fj)] - sigma.yy[g.cidx(i, fj - 1)]) / g.hy;
        const double dsyx = (s(sigma.yx, i + 1, fj - 1) + s(sigma.yx, i + 1, fj) -
                             s(sigma.yx, i - 1, fj - 1) - s(sigma.yx, i - 1, fj)) /
                            (4.0 * g.hx);
        fy[g.yidx(i, fj)] += dsyx + dsyy;
      }
    }
  });
}

}  // namespace

void body_force(const Grid& g, const CellVecField& d, const CellField& phi, const FaceFieldX& u,
                const FaceFieldY& v, const CellVecField& d_ring, const MaterialParams& params,
                FaceFieldX& fx, FaceFieldY& fy) {
  fx.a.assign(g.xfaces(), 0.0);
  fy.a.assign(g.yfaces(), 0.0);

  const Kinematics kin = strain_and_vorticity(g, u, v);
  CellMatField sigma(g);
  const CellMatField erk = ericksen_stress(g, d);
  const CellMatField ele = electric_stress(g, phi, d, params.permittivity);
  const LeslieCoefficients& lc = params.leslie;
  parallel_for(g.cells(), [&](std::size_t kb, std::size_t ke) {
    for (std::size_t k = kb; k < ke; ++k) {
      const Mat2 Dv = kin.strain(k);
      Mat2 m = leslie_stress(lc, Dv, d.at(k), d_ring.at(k)) - lc.alpha4 * Dv;
      m += ele.at(k) - erk.at(k);
      sigma.set(k, m);
    }
  });
  divergence_to_faces(g, sigma, fx, fy);
}

namespace {

// Quadratic upwind-biased interpolation of the transported value at a flux
// point between stencil values m2|m1 * p1|p2 (upstream of the * for vel>0).
inline double quick(double m2, double m1, double p1, double p2, double vel, bool have_m2,
                    bool have_p2) {
  if (vel > 0.0) {
    if (!have_m2) return 0.5 * (m1 + p1);
    return 0.125 * (3.0 * p1 + 6.0 * m1 - m2);
  }
  if (vel < 0.0) {
    if (!have_p2) return 0.5 * (m1 + p1);
    return 0.125 * (3.0 * m1 + 6.0 * p1 - p2);
  }
  return 0.5 * (m1 + p1);
}

// Conservative advective tendency div(v u), div(v v) on faces.
void advective_tendency(const Grid& g, const FaceFieldX& u, const FaceFieldY& v, FaceFieldX& au,
                        FaceFieldY& av) {
  const int nx = g.nx, ny = g.ny;
  au.a.assign(g.xfaces(), 0.0);
  av.a.assign(g.yfaces(), 0.0);

  // u-momentum: d/dx(u u) at cells, d/dy(v u) at nodes.
  std::vector<double> fuu(g.cells(), 0.0);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const double ubar = 0.5 * (u[g.xidx(i, j)] + u[g.xidx(i + 1, j)]);
      const double um2 = i >= 1 ? u[g.xidx(i - 1, j)] : 0.0;
      const double up2 = i + 2 <= nx ? u[g.xidx(i + 2, j)] : 0.0;
      const double ut = quick(um2, u[g.xidx(i, j)], u[g.xidx(i + 1, j)], up2, ubar, i >= 1,
                              i + 2 <= nx);
      fuu[g.cidx(i, j)] = ubar * ut;
    }
  std::vector<double> fvu(static_cast<std::size_t>(nx + 1) * (ny + 1), 0.0);
  for (int nj = 1; nj < ny; ++nj)
    for (int fi = 1; fi < nx; ++fi) {
      const double vbar = 0.5 * (v[g.yidx(fi - 1, nj)] + v[g.yidx(fi, nj)]);
      const double um2 = nj >= 2 ? u[g.xidx(fi, nj - 2)] : 0.0;
      const double up2 = nj + 1 < ny ? u[g.xidx(fi, nj + 1)] : 0.0;
      const double ut = quick(um2, u[g.xidx(fi, nj - 1)], u[g.xidx(fi, nj)], up2, vbar, nj >= 2,
                              nj + 1 < ny);
      fvu[static_cast<std::size_t>(nj) * (nx + 1) + fi] = vbar * ut;
    }
  for (int j = 0; j < ny; ++j)
    for (int fi = 1; fi < nx; ++fi) {
      au[g.xidx(fi, j)] = (fuu[g.cidx(fi, j)] - fuu[g.cidx(fi - 1, j)]) / g.hx +
                          (fvu[static_cast<std::size_t>(j + 1) * (nx + 1) + fi] -
                           fvu[static_cast<std::size_t>(j) * (nx + 1) + fi]) /
                              g.hy;
    }

  // v-momentum: d/dy(v v) at cells, d/dx(u v) at nodes.
  std::vector<double> fvv(g.cells(), 0.0);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const double vbar = 0.5 * (v[g.yidx(i, j)] + v[g.yidx(i, j + 1)]);
      const double vm2 = j >= 1 ? v[g.yidx(i, j - 1)] : 0.0;
      const double vp2 = j + 2 <= ny ? v[g.yidx(i, j + 2)] : 0.0;
      const double vt = quick(vm2, v[g.yidx(i, j)], v[g.yidx(i, j + 1)], vp2, vbar, j >= 1,
                              j + 2 <= ny);
      fvv[g.cidx(i, j)] = vbar * vt;
    }
  std::vector<double> fuv(static_cast<std::size_t>(nx + 1) * (ny + 1), 0.0);
  for (int nj = 1; nj < ny; ++nj)
    for (int fi = 1; fi < nx; ++fi) {
      const double ubar = 0.5 * (u[g.xidx(fi, nj - 1)] + u[g.xidx(fi, nj)]);
      const double vm2 = fi >= 2 ? v[g.yidx(fi - 2, nj)] : 0.0;
      const double vp2 = fi + 1 < nx ? v[g.yidx(fi + 1, nj)] : 0.0;
      const double vt = quick(vm2, v[g.yidx(fi - 1, nj)], v[g.yidx(fi, nj)], vp2, ubar, fi >= 2,
                              fi + 1 < nx);
      fuv[static_cast<std::size_t>(nj) * (nx + 1) + fi] = ubar * vt;
    }
  for (int fj = 1; fj < ny; ++fj)
    for (int i = 0; i < nx; ++i) {
      av[g.yidx(i, fj)] = (fuv[static_cast<std::size_t>(fj) * (nx + 1) + i + 1] -
                           fuv[static_cast<std::size_t>(fj) * (nx + 1) + i]) /
                              g.hx +
                          (fvv[g.cidx(i, fj)] - fvv[g.cidx(i, fj - 1)]) / g.hy;
    }
}

// Backward-Euler solve of (I - coef*lap) on one velocity component over
// interior faces; boundary-normal faces stay zero, tangential ghosts follow bc.
void viscous_solve_u(const Grid& g, FaceFieldX& u, double coef, FlowBc bc, double tol,
                     int max_iter) {
  const int nx = g.nx, ny = g.ny;
  const std::size_t n = static_cast<std::size_t>(nx - 1) * ny;
  const double ax = coef / (g.hx * g.hx);
  const double ay = coef / (g.hy * g.hy);
  const double tang = bc == FlowBc::NoSlip ? -1.0 : 1.0;
  auto midx = [&](int fi, int j) { return static_cast<std::size_t>(j) * (nx - 1) + fi - 1; };

  std::vector<double> b(n);
  for (int j = 0; j < ny; ++j)
    for (int fi = 1; fi < nx; ++fi) b[midx(fi, j)] = u[g.xidx(fi, j)];

  auto A = [&](const std::vector<double>& x, std::vector<double>& y) {
    y.assign(n, 0.0);
    for (int j = 0; j < ny; ++j)
      for (int fi = 1; fi < nx; ++fi) {
        const double c = x[midx(fi, j)];
        const double xl = fi > 1 ? x[midx(fi - 1, j)] : 0.0;
        const double xr = fi < nx - 1 ? x[midx(fi + 1, j)] : 0.0;
        const double xd = j > 0 ? x[midx(fi, j - 1)] : tang * c;
        const double xu = j < ny - 1 ? x[midx(fi, j + 1)] : tang * c;
        y[midx(fi, j)] =
            c - ax * (xl - 2.0 * c + xr) - ay * (xd - 2.0 * c + xu);
      }
  };
  auto M = [](const std::vector<double>& r, std::vector<double>& z) { z = r; };
  std::vector<double> sol;
  pcg(sol, b, A, M, tol, max_iter, "viscous", &b);
  for (int j = 0; j < ny; ++j)
    for (int fi = 1; fi < nx; ++fi) u[g.xidx(fi, j)] = sol[midx(fi, j)];
}

void viscous_solve_v(const Grid& g, FaceFieldY& v, double coef, FlowBc bc, double tol,
                     int max_iter) {
  const int nx = g.nx, ny = g.ny;
  const std::size_t n = static_cast<std::size_t>(nx) * (ny - 1);
  const double ax = coef / (g.hx * g.hx);
  const double ay = coef / (g.hy * g.hy);
  const double tang = bc == FlowBc::NoSlip ? -1.0 : 1.0;
  auto midx = [&](int i, int fj) { return static_cast<std::size_t>(fj - 1) * nx + i; };

  std::vector<double> b(n);
  for (int fj = 1; fj < ny; ++fj)
    for (int i = 0; i < nx; ++i) b[midx(i, fj)] = v[g.yidx(i, fj)];

  auto A = [&](const std::vector<double>& x, std::vector<double>& y) {
    y.assign(n, 0.0);
    for (int fj = 1; fj < ny; ++fj)
      for (int i = 0; i < nx; ++i) {
        const double c = x[midx(i, fj)];
        const double xd = fj > 1 ? x[midx(i, fj - 1)] : 0.0;
        const double xu = fj < ny - 1 ? x[midx(i, fj + 1)] : 0.0;
        const double xl = i > 0 ? x[midx(i - 1, fj)] : tang * c;
        const double xr = i < nx - 1 ? x[midx(i + 1, fj)] : tang * c;
        y[midx(i, fj)] =
            c - ax * (xl - 2.0 * c + xr) - ay * (xd - 2.0 * c + xu);
      }
  };
  auto M = [](const std::vector<double>& r, std::vector<double>& z) { z = r; };
  std::vector<double> sol;
  pcg(sol, b, A, M, tol, max_iter, "viscous", &b);
  for (int fj = 1; fj < ny; ++fj)
    for (int i = 0; i < nx; ++i) v[g.yidx(i, fj)] = sol[midx(i, fj)];
}

}  // namespace

FlowState ns_step(const Grid& g, const FlowState& flow, double dt, const FaceFieldX& fx,
                  const FaceFieldY& fy, const NsOptions& opt, SolveStats* pressure_stats) {
  const int nx = g.nx, ny = g.ny;
  FlowState next(g);
  next.u = flow.u;
  next.v = flow.v;

  FaceFieldX au;
  FaceFieldY av;
  advective_tendency(g, flow.u, flow.v, au, av);
  for (int j = 0; j < ny; ++j)
    for (int fi = 1; fi < nx; ++fi) next.u[g.xidx(fi, j)] -= dt * au[g.xidx(fi, j)];
  for (int fj = 1; fj < ny; ++fj)
    for (int i = 0; i < nx; ++i) next.v[g.yidx(i, fj)] -= dt * av[g.yidx(i, fj)];

  const double coef = dt * 0.5 * opt.alpha4;
  if (coef > 0.0) {
    viscous_solve_u(g, next.u, coef, opt.bc, opt.pressure_tol, opt.max_iter);
    viscous_solve_v(g, next.v, coef, opt.bc, opt.pressure_tol, opt.max_iter);
  }

  for (int j = 0; j < ny; ++j)
    for (int fi = 1; fi < nx; ++fi) next.u[g.xidx(fi, j)] += dt * fx[g.xidx(fi, j)];
  for (int fj = 1; fj < ny; ++fj)
    for (int i = 0; i < nx; ++i) next.v[g.yidx(i, fj)] += dt * fy[g.yidx(i, fj)];

  // -lap(pi) = -div(v*)/dt, then v <- v* - dt grad pi.
  CellField rhs = div_fc(g, next.u, next.v);
  for (double& x : rhs.a) x /= -dt;
  next.pi = solve_pressure_neumann(g, rhs, opt.pressure_tol, opt.max_iter, pressure_stats,
                                   &flow.pi);

  for (int j = 0; j < ny; ++j)
    for (int fi = 1; fi < nx; ++fi) {
      next.u[g.xidx(fi, j)] -= dt * (next.pi[g.cidx(fi, j)] - next.pi[g.cidx(fi - 1, j)]) / g.hx;
    }
  for (int fj = 1; fj < ny; ++fj)
    for (int i = 0; i < nx; ++i) {
      next.v[g.yidx(i, fj)] -= dt * (next.pi[g.cidx(i, fj)] - next.pi[g.cidx(i, fj - 1)]) / g.hy;
    }

  const CellField div = div_fc(g, next.u, next.v);
  next.div_inf = cell_max_abs(div);
  return next;
}

double kinetic_energy(const Grid& g, const FaceFieldX& u, const FaceFieldY& v) {
  const int nx = g.nx, ny = g.ny;
  double s = 0.0;
  for (int j = 0; j < ny; ++j)
    for (int fi = 0; fi <= nx; ++fi) {
      const double w = (fi == 0 || fi == nx) ? 0.5 : 1.0;
      const double val = u[g.xidx(fi, j)];
      s += w * val * val;
    }
  for (int fj = 0; fj <= ny; ++fj)
    for (int i = 0; i < nx; ++i) {
      const double w = (fj == 0 || fj == ny) ? 0.5 : 1.0;
      const double val = v[g.yidx(i, fj)];
      s += w * val * val;
    }
  return 0.5 * s * g.cell_volume();
}

double max_velocity(const FaceFieldX& u, const FaceFieldY& v) {
  return std::max(det_max_abs(u.a), det_max_abs(v.a));
}

}  // namespace nemel
