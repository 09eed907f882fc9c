#pragma once

#include "entrans/quadrature.hpp"

namespace entrans::specfun {

inline constexpr double kEulerGamma = 0.5772156649015328606;

struct SpecialConstant {
  const char* name;
  double value;
};
inline constexpr SpecialConstant kConstants[] = {
    {"euler_gamma", kEulerGamma},
};

// Gamma function; throws std::domain_error at poles (nonpositive integers).
double gamma_fn(double x);

// Incomplete Beta B_z(a,b) = int_0^z t^(a-1) (1-t)^(b-1) dt.  Negative b is
// supported through the hypergeometric continuation B_z(a,b) =
// z^a/a 2F1(a, 1-b; a+1; z) as long as z <= 1/2; for z in (1/2, 1] with
// b <= 0 the integral diverges and std::domain_error is thrown.
double incomplete_beta(double z, double a, double b);
double beta_fn(double a, double b);

// Gauss hypergeometric series, |z| <= 0.75; c must not be a nonpositive
// integer.  Absolute error <= 1e-10 with a geometric tail bound.
double hyp2f1(double a, double b, double c, double z);

// Exponential integral Ei(x), x > 0.
double ei(double x);

// Imaginary error function erfi(x) = -i erf(ix).
double erfi(double x);
double erf_fn(double x);
double erfc_fn(double x);

// Complete elliptic integrals in the modulus convention,
// K(k) = int_0^(pi/2) dt / sqrt(1 - k^2 sin^2 t).  AGM-based.
double elliptic_k(double k);
double elliptic_e(double k);

double bessel_j0(double x);

// Generalized Catalan number: alpha-th moment of the square Marchenko-Pastur
// density, C_alpha = int_0^4 x^alpha rho_MP(x) dx.  Integer alpha gives the
// integer Catalan sequence 1, 1, 2, 5, 14, ...
double catalan_alpha(double alpha, const quadrature::Options& opt = {});

}  // namespace entrans::specfun
