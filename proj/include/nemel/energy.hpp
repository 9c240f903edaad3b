#pragma once

#include <functional>
#include <span>
#include <vector>

#include "nemel/director.hpp"
#include "nemel/flow.hpp"
#include "nemel/grid.hpp"
#include "nemel/material.hpp"
#include "nemel/nernst_planck.hpp"

namespace nemel {

struct EnergyReport {
  double e_kinetic = 0.0;   // 1/2 int |v|^2
  double e_elastic = 0.0;   // 1/2 int |grad d|^2
  double e_entropy = 0.0;   // sum_k int c_k ln c_k
  double e_electric = 0.0;  // 1/2 int eps(d) grad phi . grad phi (solver energy form)
  double e_total = 0.0;

  double d_ionic = 0.0;       // sum_k int c_k grad mu_k . D_k grad mu_k (cellwise)
  double d_viscous = 0.0;     // alpha4 int |D(v)|^2
  double d_rotational = 0.0;  // int of the Leslie dissipation quadratic form
  // Audit total: d_ionic_flux + d_viscous + d_rotational. The flux form is
  // the ionic production of the conservative step itself (nonnegative per
  // face), so the audit residual is free of the cell-vs-face quadrature gap.
  double d_total = 0.0;

  // Companion quantities: the exact discrete ionic production, the
  // printed-proposition viscous form, and the uniform-ellipticity lower
  // bound for the ionic term.
  double d_ionic_flux = 0.0;        // sum_k sum_faces J_f . dmu_f
  double d_viscous_dvd = 0.0;       // alpha4 int |D(v) d|^2
  double d_ionic_alpha_bound = 0.0; // alpha_min sum_k int c_k |grad mu_k|^2
};

/// Energy components of a state; midpoint quadrature, deterministic order.
/// The electric term uses the elliptic solver's face-based energy form so the
/// weak-form identity <eps grad phi, grad phi> = <rho, phi> holds to solver
/// tolerance. Throws numerical_error on non-positive concentrations.
EnergyReport energy(const Grid& g, const IonState& ion, const FaceFieldX& u, const FaceFieldY& v,
                    const CellVecField& d, const CellField& phi, const MaterialParams& params);

/// Fills the dissipation terms; d_ring must be this step's co-rotational rate.
/// bc selects the velocity ghost convention (production runs are no-slip).
void dissipation(const Grid& g, const IonState& ion, const FaceFieldX& u, const FaceFieldY& v,
                 const CellVecField& d, const CellField& phi, const CellVecField& d_ring,
                 const MaterialParams& params, EnergyReport& report,
                 FlowBc bc = FlowBc::NoSlip);

struct EnergyAudit {
  std::vector<double> r;  // r_n = (E[n+1]-E[n])/dt[n] + D[n]
  double max_abs_r = 0.0;
};

/// Discrete energy-law audit along a trajectory: e_total has N+1 entries,
/// d_total and dt have N (one per transition).
EnergyAudit energy_audit(std::span<const double> e_total, std::span<const double> d_total,
                         std::span<const double> dt);

using ScalarFn = std::function<double(double, double)>;

/// Discrete evaluation of the stress-transport cancellation
///   int (gP x gP)(d x d):grad v - int ((gP x gP)d).(v.grad d)
///   - int (d x d) gP . grad(v.gP)
/// for analytic fields (sampled with an analytic ghost ring). Converges to 0
/// at second order for div-free v vanishing on the boundary.
double stress_transport_identity_defect(const Grid& g, const ScalarFn& phi, const ScalarFn& d1,
                                        const ScalarFn& d2, const ScalarFn& vx,
                                        const ScalarFn& vy);

}  // namespace nemel
