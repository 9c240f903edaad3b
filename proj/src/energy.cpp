#include "nemel/energy.hpp"

#include <cmath>
#include <string>

#include "nemel/poisson.hpp"

namespace nemel {

EnergyReport energy(const Grid& g, const IonState& ion, const FaceFieldX& u, const FaceFieldY& v,
                    const CellVecField& d, const CellField& phi, const MaterialParams& params) {
  EnergyReport rep;
  rep.e_kinetic = kinetic_energy(g, u, v);

  // Face-gradient quadrature: pairs exactly with the 5-point Laplacian by
  // summation by parts, so the elastic channel of the energy audit carries no
  // quadrature mismatch.
  {
    FaceFieldX gx;
    FaceFieldY gy;
    double elastic = 0.0;
    for (const CellField* comp : {&d.x, &d.y}) {
      grad_cc(g, *comp, BcKind::Neumann0, gx, gy);
      for (double v : gx.a) elastic += v * v;
      for (double v : gy.a) elastic += v * v;
    }
    rep.e_elastic = 0.5 * elastic * g.cell_volume();
  }

  double entropy = 0.0;
  for (const auto& c : ion.c) {
    for (std::size_t k = 0; k < c.size(); ++k) {
      if (!(c[k] > 0.0)) {
        throw numerical_error("energy: non-positive concentration at cell " + std::to_string(k));
      }
      entropy += c[k] * std::log(c[k]);
    }
  }
  rep.e_entropy = entropy * g.cell_volume();

  const AnisoOperator op(g, epsilon_field(g, d, params.permittivity));
  rep.e_electric = 0.5 * op.energy_form(phi);

  rep.e_total = rep.e_kinetic + rep.e_elastic + rep.e_entropy + rep.e_electric;
  return rep;
}

void dissipation(const Grid& g, const IonState& ion, const FaceFieldX& u, const FaceFieldY& v,
                 const CellVecField& d, const CellField& phi, const CellVecField& d_ring,
                 const MaterialParams& params, EnergyReport& report, FlowBc bc) {
  const Kinematics kin = strain_and_vorticity(g, u, v, bc);
  const double alpha_min = min_diffusion_eigenvalue(params.species);

  double ionic = 0.0;
  double ionic_bound = 0.0;
  double ionic_flux = 0.0;
  FaceFieldX jx;
  FaceFieldY jy;
  for (std::size_t s = 0; s < ion.c.size(); ++s) {
    const double z = params.species[s].valence;
    const CellField mu = chemical_potential(g, ion.c[s], phi, z);
    // One-sided second order at walls: the normal mu-gradient vanishes only
    // at steady state, and a mirror ghost would hide transient wall layers.
    const CellVecField gmu = cell_gradient_onesided(g, mu);
    const Mat2 D = params.species[s].diffusion;
    for (std::size_t k = 0; k < g.cells(); ++k) {
      const Vec2 gm = gmu.at(k);
      ionic += ion.c[s][k] * gm.dot(D.apply(gm));
      ionic_bound += ion.c[s][k] * gm.norm2();
    }
    // Exact production of the conservative drift-diffusion step.
    np_face_flux(g, ion.c[s], phi, D, z, jx, jy);
    for (int j = 0; j < g.ny; ++j)
      for (int fi = 1; fi < g.nx; ++fi) {
        const double dmu = (mu[g.cidx(fi, j)] - mu[g.cidx(fi - 1, j)]) / g.hx;
        ionic_flux += jx[g.xidx(fi, j)] * dmu;
      }
    for (int fj = 1; fj < g.ny; ++fj)
      for (int i = 0; i < g.nx; ++i) {
        const double dmu = (mu[g.cidx(i, fj)] - mu[g.cidx(i, fj - 1)]) / g.hy;
        ionic_flux += jy[g.yidx(i, fj)] * dmu;
      }
  }
  report.d_ionic = ionic * g.cell_volume();
  report.d_ionic_flux = ionic_flux * g.cell_volume();
  report.d_ionic_alpha_bound = alpha_min * ionic_bound * g.cell_volume();

  double visc = 0.0, visc_dvd = 0.0, rot = 0.0;
  for (std::size_t k = 0; k < g.cells(); ++k) {
    const Mat2 Dv = kin.strain(k);
    visc += ddot(Dv, Dv);
    const Vec2 dk = d.at(k);
    visc_dvd += Dv.apply(dk).norm2();
    rot += dissipation_quadratic_form(params.leslie, dk, Dv, d_ring.at(k));
  }
  report.d_viscous = params.leslie.alpha4 * visc * g.cell_volume();
  report.d_viscous_dvd = params.leslie.alpha4 * visc_dvd * g.cell_volume();
  report.d_rotational = rot * g.cell_volume();
  report.d_total = report.d_ionic_flux + report.d_viscous + report.d_rotational;
}

EnergyAudit energy_audit(std::span<const double> e_total, std::span<const double> d_total,
                         std::span<const double> dt) {
  EnergyAudit audit;
  if (e_total.size() < 2) return audit;
  const std::size_t n = e_total.size() - 1;
  audit.r.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    audit.r[k] = (e_total[k + 1] - e_total[k]) / dt[k] + d_total[k];
    audit.max_abs_r = std::max(audit.max_abs_r, std::fabs(audit.r[k]));
  }
  return audit;
}

double stress_transport_identity_defect(const Grid& g, const ScalarFn& phi, const ScalarFn& d1,
                                        const ScalarFn& d2, const ScalarFn& vx,
                                        const ScalarFn& vy) {
  // Sample every field on a 2-ring extended grid, differentiate with centered
  // stencils, integrate with the midpoint rule over the core cells.
  const int nx = g.nx, ny = g.ny;
  const int ex = nx + 4, pad = 2;
  auto eidx = [&](int i, int j) {
    return static_cast<std::size_t>(j + pad) * ex + (i + pad);
  };
  const std::size_t n = static_cast<std::size_t>(ex) * (ny + 4);
  std::vector<double> P(n), D1(n), D2(n), VX(n), VY(n);
  for (int j = -pad; j < ny + pad; ++j)
    for (int i = -pad; i < nx + pad; ++i) {
      const double x = g.xc(i), y = g.yc(j);
      P[eidx(i, j)] = phi(x, y);
      D1[eidx(i, j)] = d1(x, y);
      D2[eidx(i, j)] = d2(x, y);
      VX[eidx(i, j)] = vx(x, y);
      VY[eidx(i, j)] = vy(x, y);
    }
  auto gradx = [&](const std::vector<double>& f, int i, int j) {
    return (f[eidx(i + 1, j)] - f[eidx(i - 1, j)]) / (2.0 * g.hx);
  };
  auto grady = [&](const std::vector<double>& f, int i, int j) {
    return (f[eidx(i, j + 1)] - f[eidx(i, j - 1)]) / (2.0 * g.hy);
  };

  // w = v . grad phi on a 1-ring extension.
  std::vector<double> W(n, 0.0);
  for (int j = -1; j < ny + 1; ++j)
    for (int i = -1; i < nx + 1; ++i) {
      W[eidx(i, j)] =
          VX[eidx(i, j)] * gradx(P, i, j) + VY[eidx(i, j)] * grady(P, i, j);
    }

  double defect = 0.0;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const Vec2 gp{gradx(P, i, j), grady(P, i, j)};
      const Vec2 d{D1[eidx(i, j)], D2[eidx(i, j)]};
      const Vec2 vel{VX[eidx(i, j)], VY[eidx(i, j)]};
      const Mat2 gv{gradx(VX, i, j), grady(VX, i, j), gradx(VY, i, j), grady(VY, i, j)};
      const Vec2 vgradd{vel.x * gradx(D1, i, j) + vel.y * grady(D1, i, j),
                        vel.x * gradx(D2, i, j) + vel.y * grady(D2, i, j)};
      const Vec2 gw{gradx(W, i, j), grady(W, i, j)};

      const double gpd = gp.dot(d);
      const double term1 = gpd * gp.dot(gv.apply(d));
      const double term2 = gpd * gp.dot(vgradd);
      const double term3 = gpd * d.dot(gw);
      defect += term1 - term2 - term3;
    }
  return defect * g.cell_volume();
}

}  // namespace nemel
