#include <doctest.h>

#include <cmath>

#include "nemel/equilibrium.hpp"
#include "nemel/flow.hpp"

using namespace nemel;

TEST_SUITE_BEGIN("equilibrium");

namespace {

CellMatField uniform_eps(const Grid& g, double eps_a, double theta = 0.0) {
  CellVecField d(g);
  for (std::size_t k = 0; k < g.cells(); ++k) {
    d.x.a[k] = std::cos(theta);
    d.y.a[k] = std::sin(theta);
  }
  return epsilon_field(g, d, Permittivity{1.0, eps_a});
}

}  // namespace

TEST_CASE("poisson_boltzmann") {
  SUBCASE("single neutral species gives zero potential") {
    const Grid g(16, 16, 1.0, 1.0);
    const CellField phi =
        solve_poisson_boltzmann(g, uniform_eps(g, 0.0), {0.0}, {1.0}, PbOptions{});
    for (double v : phi.a) CHECK(v == doctest::Approx(0.0));
  }
  SUBCASE("charge-symmetric binary electrolyte has the zero solution") {
    const Grid g(24, 24, 1.0, 1.0);
    PbOptions opt;
    opt.tol = 1e-12;
    const CellField phi =
        solve_poisson_boltzmann(g, uniform_eps(g, 0.4), {1.0, -1.0}, {0.7, 0.7}, opt);
    CHECK(cell_max_abs(phi) <= 1e-10);
  }
  SUBCASE("weak forcing matches the linearized Debye solve within 5%") {
    // Linearization of -lap(phi) + 2 phi = rho0 around phi = 0 for z = +-1,
    // Z = 1: a small background charge eps*sin(pi x)sin(pi y) produces
    // phi ~= eps/(2 pi^2 + 2) sin sin.
    const Grid g(48, 48, 1.0, 1.0);
    const double amp = 1e-3;
    // Solve the nonlinear problem with the background folded into Z_+ as an
    // equivalent perturbation: use the residual form directly by comparing to
    // the analytic linearized amplitude.
    // -div(grad phi) = Z+ e^-phi - Z- e^phi + rho0 is realized by adding a
    // third frozen species of valence 0 carrying rho0; instead, perturb Z:
    // Z+ = 1 + a, Z- = 1 - a gives rho ~ 2a - 2 phi, so phi solves
    // (-lap + 2) phi = 2a (constant forcing).
    const double a = 5e-4;
    PbOptions opt;
    opt.tol = 1e-12;
    const CellField phi = solve_poisson_boltzmann(g, uniform_eps(g, 0.0), {1.0, -1.0},
                                                  {1.0 + a, 1.0 - a}, opt);
    // Linearized comparison: (-lap + 2) psi = 2a with psi = 0 on the walls.
    // Fourier sine series of the constant: psi(x,y) = sum over odd m,n of
    // 2a * 16/(mn pi^2) / (pi^2(m^2+n^2)+2) sin sin; compare at the center.
    double psi_center = 0.0;
    for (int m = 1; m <= 61; m += 2)
      for (int n = 1; n <= 61; n += 2) {
        const double coeff = 2.0 * a * 16.0 / (m * n * M_PI * M_PI) /
                             (M_PI * M_PI * (m * m + n * n) + 2.0);
        psi_center += coeff * std::sin(0.5 * M_PI * m) * std::sin(0.5 * M_PI * n);
      }
    const double phi_center = phi[g.cidx(g.nx / 2, g.ny / 2)];
    CHECK(std::fabs(phi_center - psi_center) <= 0.05 * std::fabs(psi_center));
    (void)amp;
  }
  SUBCASE("mass normalization pins the species integrals") {
    const Grid g(24, 24, 1.0, 1.0);
    std::vector<double> Z;
    PbOptions opt;
    opt.tol = 1e-11;
    const std::vector<double> masses = {1.3, 0.7};
    const CellField phi = solve_poisson_boltzmann_masses(g, uniform_eps(g, 0.0), {1.0, -1.0},
                                                         masses, Z, opt);
    for (std::size_t m = 0; m < 2; ++m) {
      CellField c(g);
      const double z = m == 0 ? 1.0 : -1.0;
      for (std::size_t k = 0; k < c.size(); ++k) c[k] = Z[m] * std::exp(-z * phi[k]);
      CHECK(cell_sum(g, c) == doctest::Approx(masses[m]).epsilon(1e-8));
    }
  }
}

TEST_CASE("equilibrium_director") {
  SUBCASE("uniform director with eps_a = 0 converges immediately") {
    const Grid g(16, 16, 1.0, 1.0);
    DirectorField d0(g);
    for (std::size_t k = 0; k < g.cells(); ++k) d0.d.x.a[k] = 1.0;
    DirectorFlowOptions opt;
    opt.tol = 1e-10;
    const DirectorField d =
        equilibrium_director(g, CellField(g), d0, Permittivity{1.0, 0.0}, 1.0, opt);
    CHECK(d.max_len_dev <= 1e-14);
  }
  SUBCASE("harmonic-map flow relaxes a smooth field to a constant") {
    const Grid g(24, 24, 1.0, 1.0);
    DirectorField d0(g);
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const double th = 0.4 * std::cos(M_PI * g.xc(i)) * std::cos(M_PI * g.yc(j));
        d0.d.x.a[g.cidx(i, j)] = std::cos(th);
        d0.d.y.a[g.cidx(i, j)] = std::sin(th);
      }
    DirectorFlowOptions opt;
    opt.tol = 1e-9;
    const DirectorField d =
        equilibrium_director(g, CellField(g), d0, Permittivity{1.0, 0.0}, 1.0, opt);
    double mean_x = 0.0, mean_y = 0.0;
    for (std::size_t k = 0; k < g.cells(); ++k) {
      mean_x += d.d.x[k];
      mean_y += d.d.y[k];
    }
    mean_x /= g.cells();
    mean_y /= g.cells();
    for (std::size_t k = 0; k < g.cells(); ++k) {
      CHECK(std::fabs(d.d.x[k] - mean_x) <= 1e-6);
      CHECK(std::fabs(d.d.y[k] - mean_y) <= 1e-6);
    }
  }
  SUBCASE("a strong aligned field pulls the director onto the field axis") {
    const Grid g(16, 16, 1.0, 1.0);
    CellField phi(g);
    const double E = 3.0;
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) phi[g.cidx(i, j)] = E * g.xc(i);
    DirectorField d0(g);
    for (std::size_t k = 0; k < g.cells(); ++k) {
      d0.d.x.a[k] = std::cos(0.9);
      d0.d.y.a[k] = std::sin(0.9);
    }
    DirectorFlowOptions opt;
    opt.tol = 1e-10;
    const DirectorField d =
        equilibrium_director(g, phi, d0, Permittivity{1.0, 1.5}, 1.0, opt);
    for (std::size_t k = 0; k < g.cells(); ++k) {
      CHECK(std::fabs(std::fabs(d.d.x[k]) - 1.0) <= 1e-5);
      CHECK(std::fabs(d.d.y[k]) <= 1e-4);
    }
  }
}

TEST_CASE("reconstruct_pressure") {
  SUBCASE("all-trivial equilibrium gives the zero field") {
    const Grid g(16, 16, 1.0, 1.0);
    EquilibriumSolution eq;
    eq.phi = CellField(g);
    eq.director = DirectorField(g);
    for (std::size_t k = 0; k < g.cells(); ++k) eq.director.d.x.a[k] = 1.0;
    eq.Z = {2.0};
    eq.c = {CellField(g, 2.0)};
    const CellField pi = reconstruct_pressure(g, eq, Permittivity{1.0, 0.0});
    for (double v : pi.a) CHECK(std::fabs(v) <= 1e-13);
  }
}

TEST_CASE("coupled equilibrium solve and residuals") {
  const Grid g(24, 24, 1.0, 1.0);
  MaterialParams mp;
  mp.leslie = LeslieCoefficients{0.0, -0.5, 0.5, 1.0, 0.5, 0.5};
  mp.species = {IonSpecies{1.0, Mat2::identity()}, IonSpecies{-1.0, Mat2::identity()}};
  mp.permittivity = Permittivity{1.0, 0.4};
  DirectorField d0(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double th = 0.3 + 0.3 * std::cos(M_PI * g.xc(i));
      d0.d.x.a[g.cidx(i, j)] = std::cos(th);
      d0.d.y.a[g.cidx(i, j)] = std::sin(th);
    }
  EquilibriumOptions opt;
  opt.pb.tol = 1e-11;
  opt.flow.tol = 1e-9;
  opt.joint_tol = 1e-8;
  const std::vector<double> masses = {1.25, 0.8};
  const EquilibriumSolution eq = solve_equilibrium(g, mp, masses, d0, opt);

  SUBCASE("Boltzmann construction and mass pinning") {
    for (std::size_t m = 0; m < 2; ++m) {
      CHECK(cell_sum(g, eq.c[m]) == doctest::Approx(masses[m]).epsilon(1e-7));
      for (std::size_t k = 0; k < g.cells(); ++k) {
        const double z = mp.species[m].valence;
        CHECK(eq.c[m][k] ==
              doctest::Approx(eq.Z[m] * std::exp(-z * eq.phi[k])).epsilon(1e-12));
      }
    }
  }
  SUBCASE("equilibrium fields produce tiny dynamic residuals") {
    IonState ion = IonState::from_fields(g, eq.c);
    const ResidualRecord rec = equilibrium_residual(g, ion, FaceFieldX(g), FaceFieldY(g),
                                                    eq.director.d, eq.phi, mp);
    CHECK(rec.v_inf == 0.0);
    CHECK(rec.grad_mu_inf <= 1e-6);
    CHECK(rec.d_ring_inf <= 1e-6);
  }
  SUBCASE("perturbing the concentration shows up in the residual") {
    std::vector<CellField> cp = eq.c;
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        cp[0][g.cidx(i, j)] *= 1.0 + 1e-3 * std::sin(M_PI * g.xc(i));
      }
    IonState ion = IonState::from_fields(g, cp);
    const ResidualRecord rec = equilibrium_residual(g, ion, FaceFieldX(g), FaceFieldY(g),
                                                    eq.director.d, eq.phi, mp);
    CHECK(rec.grad_mu_inf >= 1e-4);  // ~ 1e-3 * pi
    CHECK(rec.grad_mu_inf <= 1e-2);
  }
  SUBCASE("pressure gradient matches the body force to discretization error") {
    FaceFieldX fx;
    FaceFieldY fy;
    body_force(g, eq.director.d, eq.phi, FaceFieldX(g), FaceFieldY(g), CellVecField(g), mp,
               fx, fy);
    double acc = 0.0, scale = 0.0;
    for (int j = 0; j < g.ny; ++j)
      for (int fi = 1; fi < g.nx; ++fi) {
        const double gp = (eq.pi[g.cidx(fi, j)] - eq.pi[g.cidx(fi - 1, j)]) / g.hx;
        acc = std::max(acc, std::fabs(gp - fx[g.xidx(fi, j)]));
        scale = std::max(scale, std::fabs(fx[g.xidx(fi, j)]));
      }
    CHECK(acc <= 0.05 * (1.0 + scale));
  }
}

TEST_SUITE_END();
