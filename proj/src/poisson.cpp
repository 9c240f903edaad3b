#include "nemel/poisson.hpp"

#include <cmath>

namespace nemel {

namespace {

// Symmetric Gauss-Seidel sweeps approximating the inverse of the isotropic
// 5-point Laplacian (scale-free: PCG is invariant under scaling of M).
// dirichlet=true uses odd-reflection ghosts, else mirror (Neumann). The
// inverse diagonal is precomputed; the interior row core is branch-free.
void sgs_laplace(const Grid& g, const std::vector<double>& r, std::vector<double>& z,
                 bool dirichlet, int sweeps) {
  const int nx = g.nx, ny = g.ny;
  const double ax = 1.0 / (g.hx * g.hx);
  const double ay = 1.0 / (g.hy * g.hy);
  const double wall = dirichlet ? 3.0 : 1.0;
  z.assign(r.size(), 0.0);

  static thread_local std::vector<double> invdiag;
  invdiag.resize(r.size());
  for (int j = 0; j < ny; ++j) {
    const double dy = (j == 0 || j == ny - 1) ? wall : 2.0;
    for (int i = 0; i < nx; ++i) {
      const double dx = (i == 0 || i == nx - 1) ? wall : 2.0;
      invdiag[g.cidx(i, j)] = 1.0 / (dx * ax + dy * ay);
    }
  }

  auto relax = [&](int i, int j) {
    const std::size_t k = g.cidx(i, j);
    double s = r[k];
    if (i > 0) s += ax * z[k - 1];
    if (i < nx - 1) s += ax * z[k + 1];
    if (j > 0) s += ay * z[k - nx];
    if (j < ny - 1) s += ay * z[k + nx];
    z[k] = s * invdiag[k];
  };
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    for (int j = 0; j < ny; ++j) {
      relax(0, j);
      const std::size_t row = g.cidx(0, j);
      if (j > 0 && j < ny - 1) {
        const double d_in = 1.0 / (2.0 * ax + 2.0 * ay);
        for (int i = 1; i < nx - 1; ++i) {
          const std::size_t k = row + i;
          z[k] = (r[k] + ax * (z[k - 1] + z[k + 1]) + ay * (z[k - nx] + z[k + nx])) * d_in;
        }
      } else {
        for (int i = 1; i < nx - 1; ++i) relax(i, j);
      }
      if (nx > 1) relax(nx - 1, j);
    }
    for (int j = ny - 1; j >= 0; --j) {
      relax(nx - 1, j);
      const std::size_t row = g.cidx(0, j);
      if (j > 0 && j < ny - 1) {
        const double d_in = 1.0 / (2.0 * ax + 2.0 * ay);
        for (int i = nx - 2; i >= 1; --i) {
          const std::size_t k = row + i;
          z[k] = (r[k] + ax * (z[k - 1] + z[k + 1]) + ay * (z[k - nx] + z[k + nx])) * d_in;
        }
      } else {
        for (int i = nx - 2; i >= 1; --i) relax(i, j);
      }
      if (nx > 1) relax(0, j);
    }
  }
}

void subtract_mean(std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  const double mean = s / static_cast<double>(v.size());
  for (double& x : v) x -= mean;
}

}  // namespace

AnisoOperator::AnisoOperator(const Grid& g, const CellMatField& eps) : grid_(g) {
  const int nx = g.nx, ny = g.ny;
  for (std::size_t k = 0; k < g.cells(); ++k) {
    const Mat2 e = eps.at(k);
    if (!(e.xx > 0.0) || !(e.yy > 0.0) || !(e.xx * e.yy - e.xy * e.yx > 0.0)) {
      throw numerical_error("poisson: coefficient tensor is not positive definite");
    }
  }
  e11_.assign(g.xfaces(), 0.0);
  e22_.assign(g.yfaces(), 0.0);
  e12_.assign(static_cast<std::size_t>(nx + 1) * (ny + 1), 0.0);

  for (int j = 0; j < ny; ++j)
    for (int i = 0; i <= nx; ++i) {
      const double l = eps.xx[g.cidx(i > 0 ? i - 1 : 0, j)];
      const double r = eps.xx[g.cidx(i < nx ? i : nx - 1, j)];
      e11_[g.xidx(i, j)] = 0.5 * (l + r);
    }
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const double l = eps.yy[g.cidx(i, j > 0 ? j - 1 : 0)];
      const double r = eps.yy[g.cidx(i, j < ny ? j : ny - 1)];
      e22_[g.yidx(i, j)] = 0.5 * (l + r);
    }
  for (int nj = 0; nj <= ny; ++nj)
    for (int ni = 0; ni <= nx; ++ni) {
      double s = 0.0;
      int cnt = 0;
      for (int j = nj - 1; j <= nj; ++j)
        for (int i = ni - 1; i <= ni; ++i) {
          if (i < 0 || i >= nx || j < 0 || j >= ny) continue;
          s += eps.xy[g.cidx(i, j)];
          ++cnt;
        }
      e12_[static_cast<std::size_t>(nj) * (nx + 1) + ni] = s / cnt;
    }
}

void AnisoOperator::apply(const CellField& x, CellField& y) const {
  const Grid& g = grid_;
  const int nx = g.nx, ny = g.ny;
  const double ihx = 1.0 / g.hx, ihy = 1.0 / g.hy;
  static thread_local std::vector<double> gx, gy, fx, fy;
  gx.resize(g.xfaces());
  gy.resize(g.yfaces());
  fx.resize(g.xfaces());
  fy.resize(g.yfaces());

  // Face gradients; boundary faces use the odd-reflection ghost.
  for (int j = 0; j < ny; ++j) {
    const std::size_t row = g.cidx(0, j);
    const std::size_t frow = g.xidx(0, j);
    gx[frow] = 2.0 * x[row] * ihx;
    for (int fi = 1; fi < nx; ++fi) gx[frow + fi] = (x[row + fi] - x[row + fi - 1]) * ihx;
    gx[frow + nx] = -2.0 * x[row + nx - 1] * ihx;
  }
  for (int i = 0; i < nx; ++i) gy[g.yidx(i, 0)] = 2.0 * x[g.cidx(i, 0)] * ihy;
  for (int fj = 1; fj < ny; ++fj) {
    const std::size_t rhi = g.cidx(0, fj), rlo = g.cidx(0, fj - 1);
    const std::size_t frow = g.yidx(0, fj);
    for (int i = 0; i < nx; ++i) gy[frow + i] = (x[rhi + i] - x[rlo + i]) * ihy;
  }
  for (int i = 0; i < nx; ++i) gy[g.yidx(i, ny)] = -2.0 * x[g.cidx(i, ny - 1)] * ihy;

  // Fluxes: diagonal part everywhere, node cross terms between interior faces.
  const std::size_t nodes_per_row = static_cast<std::size_t>(nx + 1);
  for (int j = 0; j < ny; ++j) {
    const std::size_t frow = g.xidx(0, j);
    fx[frow] = e11_[frow] * gx[frow];
    for (int fi = 1; fi < nx; ++fi) {
      double flux = e11_[frow + fi] * gx[frow + fi];
      double cross = 0.0;
      if (j >= 1) {
        cross += e12_[static_cast<std::size_t>(j) * nodes_per_row + fi] *
                 (gy[g.yidx(fi - 1, j)] + gy[g.yidx(fi, j)]);
      }
      if (j + 1 <= ny - 1) {
        cross += e12_[static_cast<std::size_t>(j + 1) * nodes_per_row + fi] *
                 (gy[g.yidx(fi - 1, j + 1)] + gy[g.yidx(fi, j + 1)]);
      }
      fx[frow + fi] = flux + 0.25 * cross;
    }
    fx[frow + nx] = e11_[frow + nx] * gx[frow + nx];
  }
  for (int i = 0; i < nx; ++i) fy[g.yidx(i, 0)] = e22_[g.yidx(i, 0)] * gy[g.yidx(i, 0)];
  for (int fj = 1; fj < ny; ++fj) {
    const std::size_t frow = g.yidx(0, fj);
    const std::size_t nrow = static_cast<std::size_t>(fj) * nodes_per_row;
    for (int i = 0; i < nx; ++i) {
      double flux = e22_[frow + i] * gy[frow + i];
      double cross = 0.0;
      if (i >= 1) cross += e12_[nrow + i] * (gx[g.xidx(i, fj - 1)] + gx[g.xidx(i, fj)]);
      if (i + 1 <= nx - 1) {
        cross += e12_[nrow + i + 1] * (gx[g.xidx(i + 1, fj - 1)] + gx[g.xidx(i + 1, fj)]);
      }
      fy[frow + i] = flux + 0.25 * cross;
    }
  }
  for (int i = 0; i < nx; ++i) fy[g.yidx(i, ny)] = e22_[g.yidx(i, ny)] * gy[g.yidx(i, ny)];

  y.a.resize(g.cells());
  for (int j = 0; j < ny; ++j) {
    const std::size_t row = g.cidx(0, j);
    const std::size_t fxrow = g.xidx(0, j);
    const std::size_t fyrow = g.yidx(0, j);
    for (int i = 0; i < nx; ++i) {
      y[row + i] = -((fx[fxrow + i + 1] - fx[fxrow + i]) * ihx +
                     (fy[fyrow + nx + i] - fy[fyrow + i]) * ihy);
    }
  }
}

double AnisoOperator::energy_form(const CellField& phi) const {
  CellField Aphi(grid_);
  apply(phi, Aphi);
  double s = 0.0;
  for (std::size_t k = 0; k < phi.size(); ++k) s += Aphi[k] * phi[k];
  return s * grid_.cell_volume();
}

CellField solve_aniso_dirichlet(const EllipticProblem& p, SolveStats* stats,
                                const CellField* warm_start) {
  if (!(p.tol > 0.0)) throw config_error("poisson: tolerance must be positive");
  const AnisoOperator op(p.grid, p.eps);
  CellField x(p.grid), y(p.grid);
  auto A = [&](const std::vector<double>& in, std::vector<double>& out) {
    CellField xin;
    xin.a = in;
    CellField yout;
    op.apply(xin, yout);
    out = std::move(yout.a);
  };
  auto M = [&](const std::vector<double>& r, std::vector<double>& z) {
    sgs_laplace(p.grid, r, z, /*dirichlet=*/true, /*sweeps=*/4);
  };
  std::vector<double> sol;
  const SolveStats st = pcg(sol, p.rhs.a, A, M, p.tol, p.max_iter, "poisson",
                            warm_start != nullptr ? &warm_start->a : nullptr);
  if (stats != nullptr) *stats = st;
  CellField out;
  out.a = std::move(sol);
  return out;
}

CellField solve_pressure_neumann(const Grid& g, const CellField& rhs, double tol, int max_iter,
                                 SolveStats* stats, const CellField* warm_start) {
  std::vector<double> b = rhs.a;
  subtract_mean(b);

  // Dedicated 5-point Neumann apply (matches laplacian_cc with mirror ghosts).
  const int nx = g.nx, ny = g.ny;
  const double ax = 1.0 / (g.hx * g.hx);
  const double ay = 1.0 / (g.hy * g.hy);
  auto A = [&](const std::vector<double>& in, std::vector<double>& out) {
    out.resize(in.size());
    for (int j = 0; j < ny; ++j) {
      const std::size_t row = g.cidx(0, j);
      for (int i = 0; i < nx; ++i) {
        const std::size_t k = row + i;
        double s = 0.0;
        if (i > 0) s += ax * (in[k] - in[k - 1]);
        if (i < nx - 1) s += ax * (in[k] - in[k + 1]);
        if (j > 0) s += ay * (in[k] - in[k - nx]);
        if (j < ny - 1) s += ay * (in[k] - in[k + nx]);
        out[k] = s;
      }
    }
  };
  auto M = [&](const std::vector<double>& r, std::vector<double>& z) {
    sgs_laplace(g, r, z, /*dirichlet=*/false, /*sweeps=*/4);
    subtract_mean(z);
  };
  std::vector<double> x0;
  if (warm_start != nullptr && warm_start->size() == b.size()) {
    x0 = warm_start->a;
    subtract_mean(x0);
  }
  std::vector<double> sol;
  const SolveStats st = pcg(sol, b, A, M, tol, max_iter, "pressure",
                            x0.empty() ? nullptr : &x0);
  if (stats != nullptr) *stats = st;
  subtract_mean(sol);
  CellField out;
  out.a = std::move(sol);
  return out;
}

CellVecField efield(const Grid& g, const CellField& phi) { return cell_gradient_onesided(g, phi); }

CellMatField epsilon_field(const Grid& g, const CellVecField& d, const Permittivity& p) {
  CellMatField out(g);
  parallel_for(g.cells(), [&](std::size_t kb, std::size_t ke) {
    for (std::size_t k = kb; k < ke; ++k) out.set(k, epsilon_tensor(d.at(k), p));
  });
  return out;
}

}  // namespace nemel
