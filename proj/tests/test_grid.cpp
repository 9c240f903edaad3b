#include <doctest.h>

#include <cmath>
#include <random>

#include "nemel/grid.hpp"

using namespace nemel;

TEST_SUITE_BEGIN("grid");

TEST_CASE("grad_cc exactness") {
  const Grid g(16, 12, 1.0, 1.0);
  SUBCASE("constant field has zero gradient") {
    CellField f(g, 3.7);
    FaceFieldX gx;
    FaceFieldY gy;
    grad_cc(g, f, BcKind::Neumann0, gx, gy);
    for (double v : gx.a) CHECK(v == doctest::Approx(0.0));
    for (double v : gy.a) CHECK(v == doctest::Approx(0.0));
  }
  SUBCASE("f = x is exact on interior faces") {
    CellField f(g);
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) f[g.cidx(i, j)] = g.xc(i);
    FaceFieldX gx;
    FaceFieldY gy;
    grad_cc(g, f, BcKind::Neumann0, gx, gy);
    for (int j = 0; j < g.ny; ++j)
      for (int fi = 1; fi < g.nx; ++fi) {
        CHECK(gx[g.xidx(fi, j)] == doctest::Approx(1.0).epsilon(1e-13));
      }
  }
  SUBCASE("f = x^2 is exact at interior face midpoints") {
    CellField f(g);
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) f[g.cidx(i, j)] = g.xc(i) * g.xc(i);
    FaceFieldX gx;
    FaceFieldY gy;
    grad_cc(g, f, BcKind::Neumann0, gx, gy);
    for (int j = 0; j < g.ny; ++j)
      for (int fi = 1; fi < g.nx; ++fi) {
        CHECK(gx[g.xidx(fi, j)] == doctest::Approx(2.0 * g.xf(fi)).epsilon(1e-12));
      }
  }
}

TEST_CASE("div_fc") {
  const Grid g(16, 16, 1.0, 1.0);
  SUBCASE("constant flux has zero divergence in the interior") {
    FaceFieldX fx(g, 2.0);
    FaceFieldY fy(g, -1.0);
    const CellField d = div_fc(g, fx, fy);
    for (int j = 1; j < g.ny - 1; ++j)
      for (int i = 1; i < g.nx - 1; ++i) {
        CHECK(d[g.cidx(i, j)] == doctest::Approx(0.0));
      }
  }
  SUBCASE("linear flux Fx = x gives div = 1 exactly") {
    FaceFieldX fx(g);
    FaceFieldY fy(g);
    for (int j = 0; j < g.ny; ++j)
      for (int fi = 0; fi <= g.nx; ++fi) fx[g.xidx(fi, j)] = g.xf(fi);
    const CellField d = div_fc(g, fx, fy);
    for (std::size_t k = 0; k < d.size(); ++k) CHECK(d[k] == doctest::Approx(1.0));
  }
  SUBCASE("conservative pairing: zero boundary flux sums to zero") {
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    FaceFieldX fx(g);
    FaceFieldY fy(g);
    double norm = 0.0;
    for (int j = 0; j < g.ny; ++j)
      for (int fi = 1; fi < g.nx; ++fi) {
        fx[g.xidx(fi, j)] = u(rng);
        norm = std::max(norm, std::fabs(fx[g.xidx(fi, j)]));
      }
    for (int fj = 1; fj < g.ny; ++fj)
      for (int i = 0; i < g.nx; ++i) {
        fy[g.yidx(i, fj)] = u(rng);
        norm = std::max(norm, std::fabs(fy[g.yidx(i, fj)]));
      }
    const CellField d = div_fc(g, fx, fy);
    CHECK(std::fabs(cell_sum(g, d)) <= 1e-13 * norm);
  }
  SUBCASE("adjointness: <div F, f> = -<F, grad f> for interior flux") {
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    FaceFieldX fx(g);
    FaceFieldY fy(g);
    for (int j = 0; j < g.ny; ++j)
      for (int fi = 1; fi < g.nx; ++fi) fx[g.xidx(fi, j)] = u(rng);
    for (int fj = 1; fj < g.ny; ++fj)
      for (int i = 0; i < g.nx; ++i) fy[g.yidx(i, fj)] = u(rng);
    CellField f(g);
    for (std::size_t k = 0; k < f.size(); ++k) f[k] = u(rng);

    const CellField d = div_fc(g, fx, fy);
    double lhs = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k) lhs += d[k] * f[k];
    lhs *= g.cell_volume();

    FaceFieldX gx;
    FaceFieldY gy;
    grad_cc(g, f, BcKind::Neumann0, gx, gy);
    double rhs = 0.0;
    for (std::size_t k = 0; k < gx.size(); ++k) rhs += fx[k] * gx[k];
    for (std::size_t k = 0; k < gy.size(); ++k) rhs += fy[k] * gy[k];
    rhs *= -g.cell_volume();
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("laplacian_cc") {
  SUBCASE("neumann annihilates constants exactly") {
    const Grid g(12, 20, 2.0, 1.0);
    CellField f(g, 42.0);
    const CellField l = laplacian_cc(g, f, BcKind::Neumann0);
    for (double v : l.a) CHECK(v == 0.0);
  }
  SUBCASE("dirichlet converges at second order on sin*sin") {
    auto err = [](int n) {
      const Grid g(n, n, 1.0, 1.0);
      CellField f(g);
      for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
          f[g.cidx(i, j)] = std::sin(M_PI * g.xc(i)) * std::sin(M_PI * g.yc(j));
        }
      const CellField l = laplacian_cc(g, f, BcKind::Dirichlet0);
      double e = 0.0;
      for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
          e = std::max(e, std::fabs(l[g.cidx(i, j)] + 2.0 * M_PI * M_PI * f[g.cidx(i, j)]));
        }
      return e;
    };
    const double ratio = err(16) / err(32);
    CHECK(ratio >= 3.5);
    CHECK(ratio <= 4.5);
  }
  SUBCASE("dirichlet operator is symmetric") {
    const Grid g(8, 8, 1.0, 1.0);
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    CellField f(g), h(g);
    for (std::size_t k = 0; k < f.size(); ++k) {
      f[k] = u(rng);
      h[k] = u(rng);
    }
    const CellField lf = laplacian_cc(g, f, BcKind::Dirichlet0);
    const CellField lh = laplacian_cc(g, h, BcKind::Dirichlet0);
    double a = 0.0, b = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k) {
      a += lf[k] * h[k];
      b += f[k] * lh[k];
    }
    CHECK(a == doctest::Approx(b).epsilon(1e-12));
  }
}

TEST_CASE("operators are linear (superposition on random fields)") {
  const Grid g(10, 14, 1.0, 1.5);
  std::mt19937 rng(41);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  CellField f(g), h(g);
  for (std::size_t k = 0; k < f.size(); ++k) {
    f[k] = u(rng);
    h[k] = u(rng);
  }
  CellField fh(g);
  for (std::size_t k = 0; k < f.size(); ++k) fh[k] = 2.0 * f[k] - 3.0 * h[k];
  const CellField l1 = laplacian_cc(g, fh, BcKind::Dirichlet0);
  const CellField lf = laplacian_cc(g, f, BcKind::Dirichlet0);
  const CellField lh = laplacian_cc(g, h, BcKind::Dirichlet0);
  for (std::size_t k = 0; k < f.size(); ++k) {
    CHECK(l1[k] == doctest::Approx(2.0 * lf[k] - 3.0 * lh[k]).epsilon(1e-12));
  }
}

TEST_CASE("strain_and_vorticity") {
  const Grid g(32, 32, 1.0, 1.0);
  SUBCASE("zero velocity") {
    FaceFieldX u(g);
    FaceFieldY v(g);
    const Kinematics kin = strain_and_vorticity(g, u, v);
    for (std::size_t k = 0; k < g.cells(); ++k) {
      CHECK(kin.w[k] == 0.0);
      CHECK(kin.dxx[k] == 0.0);
      CHECK(kin.dxy[k] == 0.0);
      CHECK(kin.dyy[k] == 0.0);
    }
  }
  SUBCASE("rigid rotation: D = 0, W = omega") {
    const double omega = 0.8;
    FaceFieldX u(g);
    FaceFieldY v(g);
    for (int j = 0; j < g.ny; ++j)
      for (int fi = 0; fi <= g.nx; ++fi) u[g.xidx(fi, j)] = -omega * g.yc(j);
    for (int fj = 0; fj <= g.ny; ++fj)
      for (int i = 0; i < g.nx; ++i) v[g.yidx(i, fj)] = omega * g.xc(i);
    const Kinematics kin = strain_and_vorticity(g, u, v);
    for (int j = 2; j < g.ny - 2; ++j)
      for (int i = 2; i < g.nx - 2; ++i) {
        const std::size_t k = g.cidx(i, j);
        CHECK(std::fabs(kin.dxx[k]) <= 1e-12);
        CHECK(std::fabs(kin.dxy[k]) <= 1e-12);
        CHECK(std::fabs(kin.dyy[k]) <= 1e-12);
        CHECK(kin.w[k] == doctest::Approx(omega).epsilon(1e-10));
      }
  }
  SUBCASE("pure shear u = gd*y: D = [[0, gd/2], [gd/2, 0]], W = -gd/2") {
    const double gd = 1.3;
    FaceFieldX u(g);
    FaceFieldY v(g);
    for (int j = 0; j < g.ny; ++j)
      for (int fi = 0; fi <= g.nx; ++fi) u[g.xidx(fi, j)] = gd * g.yc(j);
    const Kinematics kin = strain_and_vorticity(g, u, v);
    for (int j = 2; j < g.ny - 2; ++j)
      for (int i = 2; i < g.nx - 2; ++i) {
        const std::size_t k = g.cidx(i, j);
        CHECK(kin.dxy[k] == doctest::Approx(gd / 2.0).epsilon(1e-10));
        CHECK(kin.w[k] == doctest::Approx(-gd / 2.0).epsilon(1e-10));
      }
  }
}

TEST_SUITE_END();
