#pragma once

#include <vector>

#include "nemel/director.hpp"
#include "nemel/grid.hpp"
#include "nemel/material.hpp"
#include "nemel/nernst_planck.hpp"
#include "nemel/poisson.hpp"

namespace nemel {

struct EquilibriumSolution {
  CellField phi;
  DirectorField director;
  std::vector<double> Z;       // positive Boltzmann prefactors
  std::vector<CellField> c;    // c_k = Z_k exp(-z_k phi)
  CellField pi;                // reconstructed pressure, zero mean
  double poisson_residual = 0.0;
  double director_residual = 0.0;
};

struct PbOptions {
  double tol = 1e-10;
  int max_iter = 50;
  double linear_tol = 1e-12;
  int linear_max_iter = 20000;
};

/// Damped Newton iteration for -div(eps grad phi) = sum_k z_k Z_k exp(-z_k phi)
/// with phi = 0 on the boundary. The Jacobian adds the nonnegative diagonal
/// sum_k z_k^2 Z_k exp(-z_k phi); backtracking keeps the residual norm
/// strictly decreasing. Throws numerical_error on non-convergence.
/// `initial_guess` warm-starts the iteration (repeated solves along a
/// director descent differ only slightly).
CellField solve_poisson_boltzmann(const Grid& g, const CellMatField& eps,
                                  const std::vector<double>& valences,
                                  const std::vector<double>& Z, const PbOptions& opt,
                                  double* residual = nullptr,
                                  const CellField* initial_guess = nullptr);

/// Same solve with Z_k pinned to prescribed total masses through the outer
/// normalization Z_k * int exp(-z_k phi) = m_k. A nonempty Z is reused as the
/// starting normalization.
CellField solve_poisson_boltzmann_masses(const Grid& g, const CellMatField& eps,
                                         const std::vector<double>& valences,
                                         const std::vector<double>& masses,
                                         std::vector<double>& Z, const PbOptions& opt,
                                         double* residual = nullptr,
                                         const CellField* initial_guess = nullptr);

struct DirectorFlowOptions {
  double tol = 1e-8;
  int max_iter = 200000;
  double safety = 0.4;
};

/// Pseudo-time relaxation of the static director equation with frozen phi and
/// v = 0; renormalized every iterate. Stops when ||dt_d||_inf <= tol; throws
/// on stagnation.
DirectorField equilibrium_director(const Grid& g, const CellField& phi, const DirectorField& d0,
                                   const Permittivity& perm, double gamma1,
                                   const DirectorFlowOptions& opt);

struct EquilibriumOptions {
  PbOptions pb;
  DirectorFlowOptions flow;
  double joint_tol = 1e-8;
  int max_outer = 60;
  double relax = 0.5;
};

/// Alternating solve of the coupled equilibrium system (potential <-> director)
/// with under-relaxed director updates; c_k and the reconstructed pressure are
/// filled in on return.
EquilibriumSolution solve_equilibrium(const Grid& g, const MaterialParams& params,
                                      const std::vector<double>& masses, const DirectorField& d0,
                                      const EquilibriumOptions& opt);

/// pi = sum_k c_k + (eps_perp |grad phi|^2 + eps_a ((grad phi x grad phi)d).d
///      - |grad d|^2)/2, shifted to zero mean.
CellField reconstruct_pressure(const Grid& g, const EquilibriumSolution& eq,
                               const Permittivity& perm);

struct ResidualRecord {
  double v_inf = 0.0;          // ||v||_inf
  double grad_mu_inf = 0.0;    // max_k ||grad mu_k||_inf
  double d_ring_inf = 0.0;     // ||ring(d)||_inf
  double director_inf = 0.0;   // static director equation residual
  double max_component() const;
};

/// Distance-to-equilibrium diagnostics of a dynamic state (phi must be the
/// fresh elliptic solve for this state).
ResidualRecord equilibrium_residual(const Grid& g, const IonState& ion, const FaceFieldX& u,
                                    const FaceFieldY& v, const CellVecField& d,
                                    const CellField& phi, const MaterialParams& params);

}  // namespace nemel
