#include "nemel/director.hpp"

#include <cmath>
#include <string>

#include "nemel/poisson.hpp"

namespace nemel {

void DirectorField::update_len_dev() {
  double dev = 0.0;
  for (std::size_t k = 0; k < d.x.size(); ++k) {
    dev = std::max(dev, std::fabs(d.at(k).norm() - 1.0));
  }
  max_len_dev = dev;
}

void DirectorField::renormalize() {
  for (std::size_t k = 0; k < d.x.size(); ++k) {
    const double n = d.at(k).norm();
    if (n > 0.0) {
      d.x.a[k] /= n;
      d.y.a[k] /= n;
    }
  }
}

CellVecField corotational_rate(const Grid& g, const CellVecField& d, const FaceFieldX& u,
                               const FaceFieldY& v, const CellVecField& dt_d) {
  const Kinematics kin = strain_and_vorticity(g, u, v);
  const CellVecField vc = velocity_at_centers(g, u, v);
  const CellVecField gdx = cell_gradient(g, d.x, BcKind::Neumann0);
  const CellVecField gdy = cell_gradient(g, d.y, BcKind::Neumann0);
  CellVecField out(g);
  parallel_for(g.cells(), [&](std::size_t kb, std::size_t ke) {
    for (std::size_t k = kb; k < ke; ++k) {
      const Vec2 vel = vc.at(k);
      const Vec2 advect{vel.dot(gdx.at(k)), vel.dot(gdy.at(k))};
      const Vec2 omega_d{-kin.w[k] * d.y[k], kin.w[k] * d.x[k]};
      out.set(k, dt_d.at(k) + advect - omega_d);
    }
  });
  return out;
}

namespace {

// lap d + |grad d|^2 d with matching centered stencils (Neumann ghosts).
void elastic_term(const Grid& g, const CellVecField& d, CellVecField& out) {
  const CellField lap1 = laplacian_cc(g, d.x, BcKind::Neumann0);
  const CellField lap2 = laplacian_cc(g, d.y, BcKind::Neumann0);
  const CellVecField g1 = cell_gradient(g, d.x, BcKind::Neumann0);
  const CellVecField g2 = cell_gradient(g, d.y, BcKind::Neumann0);
  parallel_for(g.cells(), [&](std::size_t kb, std::size_t ke) {
    for (std::size_t k = kb; k < ke; ++k) {
      const double grad2 = g1.at(k).norm2() + g2.at(k).norm2();
      out.x.a[k] = lap1[k] + grad2 * d.x[k];
      out.y.a[k] = lap2[k] + grad2 * d.y[k];
    }
  });
}

}  // namespace

CellVecField director_static_residual(const Grid& g, const CellVecField& d, const CellField& phi,
                                      const Permittivity& perm) {
  CellVecField out(g);
  elastic_term(g, d, out);
  if (perm.eps_a != 0.0) {
    const CellVecField e = efield(g, phi);
    parallel_for(g.cells(), [&](std::size_t kb, std::size_t ke) {
      for (std::size_t k = kb; k < ke; ++k) {
        const Vec2 dk = d.at(k);
        const Vec2 ek = e.at(k);
        const Vec2 torque = projector(dk).apply(ek * ek.dot(dk));
        out.x.a[k] += perm.eps_a * torque.x;
        out.y.a[k] += perm.eps_a * torque.y;
      }
    });
  }
  return out;
}

DirectorRates director_rhs(const Grid& g, const CellVecField& d, const FaceFieldX& u,
                           const FaceFieldY& v, const CellField& phi,
                           const MaterialParams& params) {
  const double gamma1 = params.leslie.gamma1();
  const double gamma2 = params.leslie.gamma2();
  if (!(gamma1 > 0.0)) throw config_error("director: gamma1 must be positive");

  CellVecField bracket = director_static_residual(g, d, phi, params.permittivity);
  const Kinematics kin = strain_and_vorticity(g, u, v);
  const CellVecField vc = velocity_at_centers(g, u, v);
  const CellVecField gdx = cell_gradient(g, d.x, BcKind::Neumann0);
  const CellVecField gdy = cell_gradient(g, d.y, BcKind::Neumann0);

  DirectorRates rates;
  rates.dt_d = CellVecField(g);
  rates.d_ring = CellVecField(g);
  parallel_for(g.cells(), [&](std::size_t kb, std::size_t ke) {
    for (std::size_t k = kb; k < ke; ++k) {
      const Vec2 dk = d.at(k);
      Vec2 b = bracket.at(k);
      if (gamma2 != 0.0) {
        b += (-gamma2) * projector(dk).apply(kin.strain(k).apply(dk));
      }
      const Vec2 ring = b * (1.0 / gamma1);
      const Vec2 vel = vc.at(k);
      const Vec2 advect{vel.dot(gdx.at(k)), vel.dot(gdy.at(k))};
      const Vec2 omega_d{-kin.w[k] * dk.y, kin.w[k] * dk.x};
      rates.d_ring.set(k, ring);
      rates.dt_d.set(k, omega_d - advect + ring);
    }
  });
  return rates;
}

DirectorField director_step(const Grid& g, const DirectorField& dir, const CellVecField& dt_d,
                            double dt, bool renormalize) {
  DirectorField next(g);
  for (std::size_t k = 0; k < dir.d.x.size(); ++k) {
    next.d.x.a[k] = dir.d.x[k] + dt * dt_d.x[k];
    next.d.y.a[k] = dir.d.y[k] + dt * dt_d.y[k];
    const double n = next.d.at(k).norm();
    if (n < 0.5) {
      throw numerical_error("director_step: |d| collapsed below 0.5 at cell " +
                            std::to_string(k));
    }
  }
  if (renormalize) next.renormalize();
  next.update_len_dev();
  return next;
}

}  // namespace nemel
