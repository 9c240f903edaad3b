#pragma once

#include <string>
#include <vector>

#include "nemel/tensor.hpp"

namespace nemel {

/// Leslie viscosity coefficients. gamma1, gamma2, beta, mu0 are identities of
/// the alphas and are stored derived, never set independently.
struct LeslieCoefficients {
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  double alpha3 = 0.0;
  double alpha4 = 0.0;
  double alpha5 = 0.0;
  double alpha6 = 0.0;

  double gamma1() const { return alpha3 - alpha2; }
  double gamma2() const { return alpha6 - alpha5; }
  double beta() const { return alpha5 + alpha6; }
  double mu0() const { return alpha1 + alpha5 + alpha6; }
};

struct IonSpecies {
  double valence = 0.0;
  Mat2 diffusion = Mat2::identity();  // symmetric positive definite
};

struct Permittivity {
  double eps_perp = 1.0;  // > 0
  double eps_a = 0.0;     // >= 0
};

/// Translation to the Hieber-Pruess coefficient set (mu_s, mu_0, mu_V, mu_D, mu_L, mu_P).
struct HpParams {
  double mu_s = 0.0;
  double mu_0 = 0.0;
  double mu_v = 0.0;
  double mu_d = 0.0;
  double mu_l = 0.0;
  double mu_p = 0.0;
};

struct ValidityReport {
  bool satisfies_positivity = false;  // gamma1>0, alpha4>0, alpha1>=0, 4*beta*gamma1-(gamma2+a2+a3)^2>0
  bool parodi_holds = false;          // |gamma2 - (alpha2+alpha3)| <= tol
  bool weak_conditions_hold = false;  // gamma1>0, alpha4>0, alpha1+beta>=0, 4*beta*gamma1-(...)^2>=0
  double delta = 0.0;                 // gamma1 - (gamma2+alpha2+alpha3)^2/(4*beta), NaN if beta<=0
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  double beta = 0.0;
  double mu0 = 0.0;
  HpParams hp;
  std::vector<std::string> violations;  // human-readable failed conditions
};

constexpr double kDefaultParodiTol = 1e-12;

ValidityReport validate_leslie(const LeslieCoefficients& c, double parodi_tol = kDefaultParodiTol);

/// eps_perp*I + eps_a*(d (x) d). d need not be unit length.
Mat2 epsilon_tensor(const Vec2& d, const Permittivity& p);

/// P(d) = I - d (x) d, the projector onto span{d_perp} for unit d.
Mat2 projector(const Vec2& d);

/// Leslie stress in the |d|=1 equivalent form:
///   mu0 (Dv d . d) d(x)d + a2 P(d)dr (x) d + a3 d (x) P(d)dr + a4 Dv
///   + a5 (P(d)Dv d) (x) d + a6 d (x) P(d)Dv d.
/// Throws numerical_error for non-symmetric Dv (caller bug).
Mat2 leslie_stress(const LeslieCoefficients& c, const Mat2& Dv, const Vec2& d, const Vec2& d_ring);

/// Pointwise rotational/viscous dissipation density:
///   a1 (d.Dv d)^2 + (g2+a2+a3)(a.Dv d) + beta |Dv d|^2 + g1 |a|^2.
/// For coefficients passing validate_leslie this is >= delta*|a|^2.
double dissipation_quadratic_form(const LeslieCoefficients& c, const Vec2& d, const Mat2& Dv,
                                  const Vec2& a);

/// All constitutive constants of the model.
struct MaterialParams {
  LeslieCoefficients leslie;
  std::vector<IonSpecies> species;
  Permittivity permittivity;
};

/// Smallest eigenvalue over all species diffusion matrices (the ellipticity
/// constant of the ionic diffusion).
double min_diffusion_eigenvalue(const std::vector<IonSpecies>& species);

}  // namespace nemel
