#pragma once

#include "nemel/grid.hpp"
#include "nemel/material.hpp"
#include "nemel/pcg.hpp"

namespace nemel {

struct FlowState {
  FaceFieldX u;
  FaceFieldY v;
  CellField pi;          // zero-mean pressure
  double div_inf = 0.0;  // max |div v| after the last projection

  FlowState() = default;
  explicit FlowState(const Grid& g) : u(g), v(g), pi(g) {}
};

/// Ericksen stress [grad d (.) grad d]_ij = di d . dj d, from centered
/// gradients with Neumann ghosts. Symmetric positive semi-definite.
CellMatField ericksen_stress(const Grid& g, const CellVecField& d);

/// (grad phi x grad phi) eps(d), evaluated cellwise; not symmetric in general.
CellMatField electric_stress(const Grid& g, const CellField& phi, const CellVecField& d,
                             const Permittivity& perm);

/// Face-sampled momentum forcing
///   f = -div(grad d (.) grad d) + div sigma_L^{m,expl} + div((grad phi x grad phi) eps(d)),
/// where sigma_L^{m,expl} is the Leslie stress without its alpha4 D(v) part
/// (that part is advanced with the viscous solve) and ring(d) is the
/// co-rotational rate of the current step. Divergence is taken row-wise;
/// boundary-normal faces are zero (not velocity unknowns).
void body_force(const Grid& g, const CellVecField& d, const CellField& phi, const FaceFieldX& u,
                const FaceFieldY& v, const CellVecField& d_ring, const MaterialParams& params,
                FaceFieldX& fx, FaceFieldY& fy);

struct NsOptions {
  double alpha4 = 1.0;
  FlowBc bc = FlowBc::NoSlip;
  double pressure_tol = 1e-10;
  int max_iter = 20000;
};

/// One projection step:
///   1. explicit conservative advection div(v x v) with upwind-biased
///      (quadratic) face interpolation,
///   2. backward-Euler viscous solve (I - dt*(alpha4/2) lap) per component
///      (the divergence-free form of div(alpha4 D(v))),
///   3. explicit body force,
///   4. pressure projection to the discretely divergence-free space.
FlowState ns_step(const Grid& g, const FlowState& flow, double dt, const FaceFieldX& fx,
                  const FaceFieldY& fy, const NsOptions& opt, SolveStats* pressure_stats = nullptr);

/// Kinetic energy (1/2) sum of face values squared, half-weighted on boundary
/// normal faces.
double kinetic_energy(const Grid& g, const FaceFieldX& u, const FaceFieldY& v);

double max_velocity(const FaceFieldX& u, const FaceFieldY& v);

}  // namespace nemel
