#include <doctest.h>

#include <cmath>

#include "nemel/director.hpp"

using namespace nemel;

TEST_SUITE_BEGIN("director");

namespace {

MaterialParams basic_params() {
  MaterialParams mp;
  mp.leslie = LeslieCoefficients{0.0, -0.5, 0.5, 1.0, 0.5, 0.5};  // gamma1 = 1, gamma2 = 0
  mp.species = {IonSpecies{1.0, Mat2::identity()}};
  mp.permittivity = Permittivity{1.0, 0.0};
  return mp;
}

CellVecField angle_director(const Grid& g, const std::function<double(double, double)>& theta) {
  CellVecField d(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double th = theta(g.xc(i), g.yc(j));
      d.x.a[g.cidx(i, j)] = std::cos(th);
      d.y.a[g.cidx(i, j)] = std::sin(th);
    }
  return d;
}

}  // namespace

TEST_CASE("corotational_rate") {
  const Grid g(32, 32, 1.0, 1.0);
  SUBCASE("static director in a quiescent fluid") {
    CellVecField d(g);
    for (std::size_t k = 0; k < g.cells(); ++k) d.x.a[k] = 1.0;
    const CellVecField r =
        corotational_rate(g, d, FaceFieldX(g), FaceFieldY(g), CellVecField(g));
    for (std::size_t k = 0; k < g.cells(); ++k) {
      CHECK(r.x[k] == doctest::Approx(0.0));
      CHECK(r.y[k] == doctest::Approx(0.0));
    }
  }
  SUBCASE("shear u = y with static uniform d = e1: ring = (0, 1/2)") {
    FaceFieldX u(g);
    FaceFieldY v(g);
    for (int j = 0; j < g.ny; ++j)
      for (int fi = 0; fi <= g.nx; ++fi) u[g.xidx(fi, j)] = g.yc(j);
    CellVecField d(g);
    for (std::size_t k = 0; k < g.cells(); ++k) d.x.a[k] = 1.0;
    const CellVecField r = corotational_rate(g, d, u, v, CellVecField(g));
    for (int j = 2; j < g.ny - 2; ++j)
      for (int i = 2; i < g.nx - 2; ++i) {
        CHECK(r.x[g.cidx(i, j)] == doctest::Approx(0.0).epsilon(1e-10));
        CHECK(r.y[g.cidx(i, j)] == doctest::Approx(0.5).epsilon(1e-10));
      }
  }
  SUBCASE("rigid rotation of a co-rotating director gives ring = 0") {
    // d rotated by the flow: dt_d = Omega(v) d exactly, v.grad d = 0 for
    // uniform d, so ring(d) = 0.
    const double omega = 1.1;
    FaceFieldX u(g);
    FaceFieldY v(g);
    for (int j = 0; j < g.ny; ++j)
      for (int fi = 0; fi <= g.nx; ++fi) u[g.xidx(fi, j)] = -omega * (g.yc(j) - 0.5);
    for (int fj = 0; fj <= g.ny; ++fj)
      for (int i = 0; i < g.nx; ++i) v[g.yidx(i, fj)] = omega * (g.xc(i) - 0.5);
    CellVecField d(g), dt_d(g);
    const double th = 0.3;
    for (std::size_t k = 0; k < g.cells(); ++k) {
      d.x.a[k] = std::cos(th);
      d.y.a[k] = std::sin(th);
      dt_d.x.a[k] = -omega * std::sin(th);
      dt_d.y.a[k] = omega * std::cos(th);
    }
    const CellVecField r = corotational_rate(g, d, u, v, dt_d);
    for (int j = 2; j < g.ny - 2; ++j)
      for (int i = 2; i < g.nx - 2; ++i) {
        CHECK(std::fabs(r.x[g.cidx(i, j)]) <= 1e-10);
        CHECK(std::fabs(r.y[g.cidx(i, j)]) <= 1e-10);
      }
  }
}

TEST_CASE("director_rhs") {
  SUBCASE("uniform director, no flow, no field: zero rhs") {
    const Grid g(16, 16, 1.0, 1.0);
    const MaterialParams mp = basic_params();
    CellVecField d(g);
    for (std::size_t k = 0; k < g.cells(); ++k) {
      d.x.a[k] = std::cos(0.4);
      d.y.a[k] = std::sin(0.4);
    }
    const DirectorRates r = director_rhs(g, d, FaceFieldX(g), FaceFieldY(g), CellField(g), mp);
    for (std::size_t k = 0; k < g.cells(); ++k) {
      CHECK(std::fabs(r.dt_d.x[k]) <= 1e-13);
      CHECK(std::fabs(r.dt_d.y[k]) <= 1e-13);
    }
  }
  SUBCASE("tangency: rhs is orthogonal to d at O(h^2) for smooth unit fields") {
    auto tangency_err = [](int n) {
      const Grid g(n, n, 1.0, 1.0);
      const MaterialParams mp = basic_params();
      const CellVecField d = angle_director(g, [](double x, double y) {
        return 0.8 * std::cos(M_PI * x) + 0.5 * std::cos(M_PI * y);
      });
      const DirectorRates r =
          director_rhs(g, d, FaceFieldX(g), FaceFieldY(g), CellField(g), mp);
      double m = 0.0;
      for (std::size_t k = 0; k < g.cells(); ++k) {
        m = std::max(m, std::fabs(r.dt_d.at(k).dot(d.at(k))));
      }
      return m;
    };
    const double e1 = tangency_err(32);
    const double e2 = tangency_err(64);
    CHECK(e1 / e2 >= 3.0);
    CHECK(e1 / e2 <= 5.0);
  }
  SUBCASE("electric torque rotates d toward the field axis") {
    const Grid g(16, 16, 1.0, 1.0);
    MaterialParams mp = basic_params();
    mp.permittivity = Permittivity{1.0, 2.0};
    const double E = 1.5;
    CellField phi(g);
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) phi[g.cidx(i, j)] = E * g.xc(i);
    const double th0 = M_PI / 4.0;
    CellVecField d(g);
    for (std::size_t k = 0; k < g.cells(); ++k) {
      d.x.a[k] = std::cos(th0);
      d.y.a[k] = std::sin(th0);
    }
    const DirectorRates r = director_rhs(g, d, FaceFieldX(g), FaceFieldY(g), phi, mp);
    // Closed form: dt_d = (eps_a E^2 / g1) P(d)(d1, 0).
    const Vec2 dv{std::cos(th0), std::sin(th0)};
    const Vec2 expect =
        (mp.permittivity.eps_a * E * E / mp.leslie.gamma1()) * projector(dv).apply({dv.x, 0.0});
    for (int j = 1; j < g.ny - 1; ++j)
      for (int i = 1; i < g.nx - 1; ++i) {
        CHECK(r.dt_d.x[g.cidx(i, j)] == doctest::Approx(expect.x).epsilon(1e-10));
        CHECK(r.dt_d.y[g.cidx(i, j)] == doctest::Approx(expect.y).epsilon(1e-10));
      }
    // The rotation decreases the angle toward the +x axis.
    const double theta_dot = expect.dot({-dv.y, dv.x});
    CHECK(theta_dot < 0.0);
  }
  SUBCASE("neumann compatibility: the discrete laplacian of d integrates to zero") {
    const Grid g(20, 24, 1.0, 1.3);
    const CellVecField d = angle_director(
        g, [](double x, double y) { return 0.7 * std::cos(M_PI * x) * std::cos(M_PI * y); });
    const CellField l1 = laplacian_cc(g, d.x, BcKind::Neumann0);
    const CellField l2 = laplacian_cc(g, d.y, BcKind::Neumann0);
    CHECK(std::fabs(cell_sum(g, l1)) <= 1e-11);
    CHECK(std::fabs(cell_sum(g, l2)) <= 1e-11);
  }
}

TEST_CASE("director_step") {
  const Grid g(16, 16, 1.0, 1.0);
  SUBCASE("zero rate leaves the field unchanged") {
    DirectorField dir(g);
    for (std::size_t k = 0; k < g.cells(); ++k) {
      dir.d.x.a[k] = std::cos(0.2);
      dir.d.y.a[k] = std::sin(0.2);
    }
    const DirectorField next = director_step(g, dir, CellVecField(g), 1e-3, false);
    for (std::size_t k = 0; k < g.cells(); ++k) {
      CHECK(next.d.x[k] == dir.d.x[k]);
      CHECK(next.d.y[k] == dir.d.y[k]);
    }
    CHECK(next.max_len_dev <= 1e-15);
  }
  SUBCASE("renormalization is idempotent") {
    DirectorField dir(g);
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        dir.d.x.a[g.cidx(i, j)] = 1.0 + 0.2 * g.xc(i);
        dir.d.y.a[g.cidx(i, j)] = 0.5 * g.yc(j);
      }
    DirectorField once = dir;
    once.renormalize();
    DirectorField twice = once;
    twice.renormalize();
    for (std::size_t k = 0; k < g.cells(); ++k) {
      CHECK(std::fabs(once.d.x[k] - twice.d.x[k]) <= 1e-15);
      CHECK(std::fabs(once.d.y[k] - twice.d.y[k]) <= 1e-15);
    }
  }
  SUBCASE("collapse below 0.5 is an error") {
    DirectorField dir(g);
    for (std::size_t k = 0; k < g.cells(); ++k) dir.d.x.a[k] = 1.0;
    CellVecField rate(g);
    for (std::size_t k = 0; k < g.cells(); ++k) rate.x.a[k] = -1.0;
    CHECK_THROWS_AS(director_step(g, dir, rate, 0.7, false), numerical_error);
  }
}

TEST_CASE("length drift does not grow from a small perturbation (no flow)") {
  const Grid g(32, 32, 1.0, 1.0);
  const MaterialParams mp = basic_params();
  DirectorField dir(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double th = 0.5 * std::cos(M_PI * g.xc(i));
      const double len = 1.0 + 1e-2 * std::cos(M_PI * g.yc(j));
      dir.d.x.a[g.cidx(i, j)] = len * std::cos(th);
      dir.d.y.a[g.cidx(i, j)] = len * std::sin(th);
    }
  dir.update_len_dev();
  const double dev0 = dir.max_len_dev;
  const double dt = g.hx * g.hx / 8.0;
  for (int s = 0; s < 1000; ++s) {
    const DirectorRates r =
        director_rhs(g, dir.d, FaceFieldX(g), FaceFieldY(g), CellField(g), mp);
    dir = director_step(g, dir, r.dt_d, dt, false);
  }
  CHECK(dir.max_len_dev <= dev0 * 1.05);
}

TEST_SUITE_END();
