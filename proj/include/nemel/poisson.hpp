#pragma once

#include "nemel/grid.hpp"
#include "nemel/material.hpp"
#include "nemel/pcg.hpp"

namespace nemel {

/// Discrete operator A = -div(eps(x) grad .) with Phi=0 walls. The tensor is
/// cellwise SPD; diagonal entries are averaged to faces, off-diagonal entries
/// to nodes, which keeps A exactly symmetric (the energy identity tests rely
/// on this). Cross terms couple interior face pairs only; the omitted wall
/// cross-flux is consistent because the tangential gradient of Phi vanishes
/// on the boundary.
class AnisoOperator {
public:
  AnisoOperator(const Grid& g, const CellMatField& eps);

  void apply(const CellField& x, CellField& y) const;

  /// a(phi, phi) = <A phi, phi> * hx * hy, the discrete energy form
  /// ||eps^(1/2) grad phi||^2. Equals <rhs, phi> at solver convergence.
  double energy_form(const CellField& phi) const;

  const Grid& grid() const { return grid_; }

private:
  Grid grid_;
  std::vector<double> e11_;   // x-face diagonal coefficient
  std::vector<double> e22_;   // y-face diagonal coefficient
  std::vector<double> e12_;   // node off-diagonal coefficient
};

struct EllipticProblem {
  Grid grid;
  CellMatField eps;
  CellField rhs;
  double tol = 1e-10;
  int max_iter = 20000;
};

/// Solve -div(eps grad phi) = rhs, phi = 0 on the boundary. PCG with a fixed
/// number of symmetric Gauss-Seidel sweeps on the isotropic eps_perp Laplacian
/// as preconditioner. Throws numerical_error on non-convergence.
CellField solve_aniso_dirichlet(const EllipticProblem& p, SolveStats* stats = nullptr,
                                const CellField* warm_start = nullptr);

/// Zero-mean solution of -lap(pi) = rhs with homogeneous Neumann walls; the
/// rhs mean is subtracted to enforce compatibility.
CellField solve_pressure_neumann(const Grid& g, const CellField& rhs, double tol = 1e-10,
                                 int max_iter = 20000, SolveStats* stats = nullptr,
                                 const CellField* warm_start = nullptr);

/// Cell-centered gradient of phi: centered in the interior, one-sided second
/// order at boundary cells.
CellVecField efield(const Grid& g, const CellField& phi);

/// Cellwise permittivity tensor field eps(d).
CellMatField epsilon_field(const Grid& g, const CellVecField& d, const Permittivity& p);

}  // namespace nemel
