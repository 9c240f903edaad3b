#include "nemel/nernst_planck.hpp"

#include <cmath>
#include <string>

namespace nemel {

double bernoulli(double t) {
  if (std::fabs(t) < 1e-5) return 1.0 - 0.5 * t + t * t / 12.0;
  return t / std::expm1(t);
}

IonState IonState::from_fields(const Grid& g, std::vector<CellField> fields) {
  IonState s;
  s.c = std::move(fields);
  s.masses.reserve(s.c.size());
  for (const auto& f : s.c) s.masses.push_back(cell_sum(g, f));
  return s;
}

CellField chemical_potential(const Grid& g, const CellField& c, const CellField& phi, double z) {
  CellField mu(g);
  for (std::size_t k = 0; k < c.size(); ++k) {
    if (!(c[k] > 0.0)) {
      throw numerical_error("chemical_potential: non-positive concentration at cell " +
                            std::to_string(k));
    }
    mu[k] = std::log(c[k]) + z * phi[k];
  }
  return mu;
}

namespace {

// Cell value with a ghost ring: mirror for concentrations, odd reflection for
// the potential.
inline double at_ghosted(const Grid& g, const CellField& f, int i, int j, bool dirichlet) {
  double sign = 1.0;
  if (i < 0) {
    i = 0;
    if (dirichlet) sign = -sign;
  } else if (i >= g.nx) {
    i = g.nx - 1;
    if (dirichlet) sign = -sign;
  }
  if (j < 0) {
    j = 0;
    if (dirichlet) sign = -sign;
  } else if (j >= g.ny) {
    j = g.ny - 1;
    if (dirichlet) sign = -sign;
  }
  return sign * f[g.cidx(i, j)];
}

}  // namespace

void np_face_flux(const Grid& g, const CellField& c, const CellField& phi, const Mat2& D,
                  double z, FaceFieldX& jx, FaceFieldY& jy) {
  const int nx = g.nx, ny = g.ny;
  jx.a.assign(g.xfaces(), 0.0);
  jy.a.assign(g.yfaces(), 0.0);
  const double d11 = D.xx, d22 = D.yy, d12 = 0.5 * (D.xy + D.yx);

  auto cc = [&](int i, int j) { return at_ghosted(g, c, i, j, false); };
  auto pp = [&](int i, int j) { return at_ghosted(g, phi, i, j, true); };

  parallel_for(static_cast<std::size_t>(ny), [&](std::size_t jb, std::size_t je) {
    for (std::size_t jj = jb; jj < je; ++jj) {
      const int j = static_cast<int>(jj);
      for (int fi = 1; fi < nx; ++fi) {
        const std::size_t L = g.cidx(fi - 1, j), R = g.cidx(fi, j);
        const double dpsi = z * (phi[R] - phi[L]);
        double flux = d11 / g.hx * (bernoulli(-dpsi) * c[R] - bernoulli(dpsi) * c[L]);
        if (d12 != 0.0) {
          const double gyc = (cc(fi - 1, j + 1) + cc(fi, j + 1) - cc(fi - 1, j - 1) -
                              cc(fi, j - 1)) /
                             (4.0 * g.hy);
          const double gyp = (pp(fi - 1, j + 1) + pp(fi, j + 1) - pp(fi - 1, j - 1) -
                              pp(fi, j - 1)) /
                             (4.0 * g.hy);
          flux += d12 * (gyc + z * 0.5 * (c[L] + c[R]) * gyp);
        }
        jx[g.xidx(fi, j)] = flux;
      }
    }
  });
  parallel_for(static_cast<std::size_t>(ny) + 1, [&](std::size_t jb, std::size_t je) {
    for (std::size_t jj = jb; jj < je; ++jj) {
      const int fj = static_cast<int>(jj);
      if (fj == 0 || fj == ny) continue;
      for (int i = 0; i < nx; ++i) {
        const std::size_t L = g.cidx(i, fj - 1), R = g.cidx(i, fj);
        const double dpsi = z * (phi[R] - phi[L]);
        double flux = d22 / g.hy * (bernoulli(-dpsi) * c[R] - bernoulli(dpsi) * c[L]);
        if (d12 != 0.0) {
          const double gxc = (cc(i + 1, fj - 1) + cc(i + 1, fj) - cc(i - 1, fj - 1) -
                              cc(i - 1, fj)) /
                             (4.0 * g.hx);
          const double gxp = (pp(i + 1, fj - 1) + pp(i + 1, fj) - pp(i - 1, fj - 1) -
                              pp(i - 1, fj)) /
                             (4.0 * g.hx);
          flux += d12 * (gxc + z * 0.5 * (c[L] + c[R]) * gxp);
        }
        jy[g.yidx(i, fj)] = flux;
      }
    }
  });
}

IonState np_step(const Grid& g, const IonState& ion, const std::vector<IonSpecies>& species,
                 const CellField& phi, const FaceFieldX& u, const FaceFieldY& v, double dt) {
  const int nx = g.nx, ny = g.ny;
  IonState next;
  next.masses = ion.masses;
  next.c.reserve(ion.c.size());

  FaceFieldX gx(g);
  FaceFieldY gy(g);
  for (std::size_t k = 0; k < ion.c.size(); ++k) {
    const CellField& c = ion.c[k];
    np_face_flux(g, c, phi, species[k].diffusion, species[k].valence, gx, gy);

    // Subtract the upwind advective flux; boundary-normal faces stay zero.
    for (int j = 0; j < ny; ++j)
      for (int fi = 1; fi < nx; ++fi) {
        const double uf = u[g.xidx(fi, j)];
        const double cup = uf > 0.0 ? c[g.cidx(fi - 1, j)] : c[g.cidx(fi, j)];
        gx[g.xidx(fi, j)] -= uf * cup;
      }
    for (int fj = 1; fj < ny; ++fj)
      for (int i = 0; i < nx; ++i) {
        const double vf = v[g.yidx(i, fj)];
        const double cup = vf > 0.0 ? c[g.cidx(i, fj - 1)] : c[g.cidx(i, fj)];
        gy[g.yidx(i, fj)] -= vf * cup;
      }

    CellField div = div_fc(g, gx, gy);
    CellField cn(g);
    for (std::size_t m = 0; m < cn.size(); ++m) {
      cn[m] = c[m] + dt * div[m];
      if (!(cn[m] > 0.0)) {
        throw numerical_error("np_step: concentration of species " + std::to_string(k + 1) +
                              " non-positive at cell " + std::to_string(m) + " with dt " +
                              std::to_string(dt));
      }
    }
    next.c.push_back(std::move(cn));
  }
  return next;
}

double np_positivity_dt(const Grid& g, const IonState& ion,
                        const std::vector<IonSpecies>& species, const CellField& phi,
                        const FaceFieldX& u, const FaceFieldY& v) {
  const int nx = g.nx, ny = g.ny;
  const double ax = 1.0 / (g.hx * g.hx);
  const double ay = 1.0 / (g.hy * g.hy);
  double max_out = 0.0;
  for (std::size_t k = 0; k < ion.c.size(); ++k) {
    const double z = species[k].valence;
    const double d11 = species[k].diffusion.xx;
    const double d22 = species[k].diffusion.yy;
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        double out = 0.0;
        if (i < nx - 1) {
          const double dpsi = z * (phi[g.cidx(i + 1, j)] - phi[g.cidx(i, j)]);
          out += d11 * ax * bernoulli(dpsi);
          out += std::max(0.0, u[g.xidx(i + 1, j)]) / g.hx;
        }
        if (i > 0) {
          const double dpsi = z * (phi[g.cidx(i, j)] - phi[g.cidx(i - 1, j)]);
          out += d11 * ax * bernoulli(-dpsi);
          out += std::max(0.0, -u[g.xidx(i, j)]) / g.hx;
        }
        if (j < ny - 1) {
          const double dpsi = z * (phi[g.cidx(i, j + 1)] - phi[g.cidx(i, j)]);
          out += d22 * ay * bernoulli(dpsi);
          out += std::max(0.0, v[g.yidx(i, j + 1)]) / g.hy;
        }
        if (j > 0) {
          const double dpsi = z * (phi[g.cidx(i, j)] - phi[g.cidx(i, j - 1)]);
          out += d22 * ay * bernoulli(-dpsi);
          out += std::max(0.0, -v[g.yidx(i, j)]) / g.hy;
        }
        max_out = std::max(max_out, out);
      }
  }
  return max_out > 0.0 ? 1.0 / max_out : std::numeric_limits<double>::infinity();
}

}  // namespace nemel
