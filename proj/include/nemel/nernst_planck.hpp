#pragma once

#include <vector>

#include "nemel/grid.hpp"
#include "nemel/material.hpp"

namespace nemel {

struct IonState {
  std::vector<CellField> c;       // one field per species, strictly positive
  std::vector<double> masses;     // integral of c_k recorded at t = 0

  static IonState from_fields(const Grid& g, std::vector<CellField> fields);
};

/// mu_k = ln c_k + z_k phi. Throws numerical_error on non-positive c.
CellField chemical_potential(const Grid& g, const CellField& c, const CellField& phi, double z);

/// Electro-diffusive face flux J = D grad c + z c D grad phi. The diagonal of
/// D uses the exponentially fitted (drift-stabilized) two-point flux, which is
/// exactly zero on Boltzmann pairs c = Z exp(-z phi); off-diagonal entries use
/// centered four-point tangential averages. Boundary-normal faces carry
/// exactly zero flux.
void np_face_flux(const Grid& g, const CellField& c, const CellField& phi, const Mat2& D,
                  double z, FaceFieldX& jx, FaceFieldY& jy);

/// One explicit conservative step of all species:
/// c^{n+1} = c^n + dt*(div J - div(v c)) with first-order upwind advection.
/// Throws numerical_error (with cell index and dt) if any concentration
/// becomes non-positive.
IonState np_step(const Grid& g, const IonState& ion, const std::vector<IonSpecies>& species,
                 const CellField& phi, const FaceFieldX& u, const FaceFieldY& v, double dt);

/// Largest dt for which the explicit update above is provably positivity
/// preserving (per-cell outflow-coefficient bound; off-diagonal diffusion
/// entries excluded, covered by the caller's safety factor).
double np_positivity_dt(const Grid& g, const IonState& ion,
                        const std::vector<IonSpecies>& species, const CellField& phi,
                        const FaceFieldX& u, const FaceFieldY& v);

/// Bernoulli function t/(e^t - 1), stable near t = 0.
double bernoulli(double t);

}  // namespace nemel
