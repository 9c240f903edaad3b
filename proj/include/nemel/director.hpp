#pragma once

#include "nemel/grid.hpp"
#include "nemel/material.hpp"

namespace nemel {

struct DirectorField {
  CellVecField d;
  double max_len_dev = 0.0;  // max | |d| - 1 |

  DirectorField() = default;
  explicit DirectorField(const Grid& g) : d(g) {}

  void update_len_dev();
  void renormalize();
};

/// Co-rotational rate ring(d) = dt_d + v.grad d - Omega(v) d, with
/// Omega(v)d = W*(-d2, d1).
CellVecField corotational_rate(const Grid& g, const CellVecField& d, const FaceFieldX& u,
                               const FaceFieldY& v, const CellVecField& dt_d);

struct DirectorRates {
  CellVecField dt_d;    // time derivative of d
  CellVecField d_ring;  // co-rotational rate, equal to the bracket / gamma1
};

/// Right-hand side of the director equation solved for dt_d:
///   dt_d = Omega(v)d - v.grad d
///        + (1/g1)[lap d + |grad d|^2 d + eps_a P(d)(gPhi x gPhi)d - g2 P(d)D(v)d].
/// The Laplacian and gradients use homogeneous Neumann ghosts.
DirectorRates director_rhs(const Grid& g, const CellVecField& d, const FaceFieldX& u,
                           const FaceFieldY& v, const CellField& phi,
                           const MaterialParams& params);

/// Explicit Euler update. Throws numerical_error if |d| < 0.5 anywhere before
/// renormalization (instability); renormalizes afterwards when requested.
DirectorField director_step(const Grid& g, const DirectorField& dir, const CellVecField& dt_d,
                            double dt, bool renormalize);

/// lap d + |grad d|^2 d + eps_a P(d)(gPhi x gPhi) d, the static part of the
/// director equation (zero at an equilibrium director).
CellVecField director_static_residual(const Grid& g, const CellVecField& d, const CellField& phi,
                                      const Permittivity& perm);

}  // namespace nemel
