#include "nemel/material.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "nemel/common.hpp"

namespace nemel {

ValidityReport validate_leslie(const LeslieCoefficients& c, double parodi_tol) {
  ValidityReport r;
  r.gamma1 = c.gamma1();
  r.gamma2 = c.gamma2();
  r.beta = c.beta();
  r.mu0 = c.mu0();

  const double cross = r.gamma2 + c.alpha2 + c.alpha3;
  const double discriminant = 4.0 * r.beta * r.gamma1 - cross * cross;

  if (!(r.gamma1 > 0.0)) r.violations.push_back("gamma1 > 0");
  if (!(c.alpha4 > 0.0)) r.violations.push_back("alpha4 > 0");
  if (!(c.alpha1 >= 0.0)) r.violations.push_back("alpha1 >= 0");
  if (!(discriminant > 0.0)) r.violations.push_back("4*beta*gamma1 - (gamma2+alpha2+alpha3)^2 > 0");
  r.satisfies_positivity = r.violations.empty();

  r.weak_conditions_hold =
      r.gamma1 > 0.0 && c.alpha4 > 0.0 && c.alpha1 + r.beta >= 0.0 && discriminant >= 0.0;

  r.parodi_holds = std::fabs(r.gamma2 - (c.alpha2 + c.alpha3)) <= parodi_tol;

  r.delta = r.beta > 0.0 ? r.gamma1 - cross * cross / (4.0 * r.beta)
                         : std::numeric_limits<double>::quiet_NaN();

  r.hp.mu_s = c.alpha4;
  r.hp.mu_0 = r.mu0;
  r.hp.mu_v = r.gamma1;
  r.hp.mu_d = -r.gamma2;
  r.hp.mu_p = 0.5 * (r.gamma2 - (c.alpha2 + c.alpha3));
  r.hp.mu_l = r.gamma1 != 0.0
                  ? (r.beta * r.gamma1 - 0.25 * cross * cross) / r.gamma1
                  : std::numeric_limits<double>::quiet_NaN();
  return r;
}

Mat2 epsilon_tensor(const Vec2& d, const Permittivity& p) {
  return p.eps_perp * Mat2::identity() + p.eps_a * Mat2::outer(d, d);
}

Mat2 projector(const Vec2& d) { return Mat2::identity() - Mat2::outer(d, d); }

Mat2 leslie_stress(const LeslieCoefficients& c, const Mat2& Dv, const Vec2& d,
                   const Vec2& d_ring) {
  if (!Dv.symmetric(1e-12 * (1.0 + Dv.max_abs()))) {
    throw numerical_error("leslie_stress: strain-rate tensor is not symmetric");
  }
  const Mat2 P = projector(d);
  const Vec2 Dd = Dv.apply(d);
  const Vec2 Pr = P.apply(d_ring);
  const Vec2 PDd = P.apply(Dd);

  Mat2 s = c.mu0() * Dd.dot(d) * Mat2::outer(d, d);
  s += c.alpha2 * Mat2::outer(Pr, d);
  s += c.alpha3 * Mat2::outer(d, Pr);
  s += c.alpha4 * Dv;
  s += c.alpha5 * Mat2::outer(PDd, d);
  s += c.alpha6 * Mat2::outer(d, PDd);
  return s;
}

double dissipation_quadratic_form(const LeslieCoefficients& c, const Vec2& d, const Mat2& Dv,
                                  const Vec2& a) {
  const Vec2 Dd = Dv.apply(d);
  const double dDd = d.dot(Dd);
  return c.alpha1 * dDd * dDd + (c.gamma2() + c.alpha2 + c.alpha3) * a.dot(Dd) +
         c.beta() * Dd.norm2() + c.gamma1() * a.norm2();
}

double min_diffusion_eigenvalue(const std::vector<IonSpecies>& species) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& s : species) {
    double lo, hi;
    s.diffusion.sym_eigenvalues(lo, hi);
    m = std::min(m, lo);
  }
  return m;
}

}  // namespace nemel
