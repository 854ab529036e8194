#pragma once

#include <compare>
#include <string>
#include <vector>

#include "lossyint/types.hpp"

// SU(2) special functions.
//
// Phase conventions: Condon-Shortley everywhere. Clebsch-Gordan coefficients
// are real with <j1 j1; j2 (J-j1) | J J> > 0, spherical harmonics carry the
// (-1)^m factor for m > 0, and d^j_{m,m'}(beta) = <j m| exp(-i beta J_y) |j m'>.
// Basis vectors of a spin-j representation are ordered m = -j, ..., +j.

namespace lossyint {

// Exact half-integer, stored as twice its value.
class HalfInt {
 public:
  constexpr HalfInt() = default;
  constexpr explicit HalfInt(int integer) : twice_(2 * integer) {}

  static constexpr HalfInt from_twice(int twice) {
    HalfInt h;
    h.twice_ = twice;
    return h;
  }

  constexpr int twice() const { return twice_; }
  constexpr double value() const { return 0.5 * twice_; }
  constexpr bool is_integer() const { return twice_ % 2 == 0; }

  constexpr HalfInt operator-() const { return from_twice(-twice_); }
  friend constexpr HalfInt operator+(HalfInt a, HalfInt b) { return from_twice(a.twice_ + b.twice_); }
  friend constexpr HalfInt operator-(HalfInt a, HalfInt b) { return from_twice(a.twice_ - b.twice_); }
  friend constexpr bool operator==(HalfInt, HalfInt) = default;
  friend constexpr auto operator<=>(HalfInt, HalfInt) = default;

  std::string to_string() const;

 private:
  int twice_ = 0;
};

// n/2
constexpr HalfInt half(int n) { return HalfInt::from_twice(n); }

// Throws std::domain_error unless j >= 0, |m| <= j and j - m is an integer.
void check_projection(HalfInt j, HalfInt m);

// ln(n!). Tabulated in extended precision up to n = 1024.
double log_factorial(int n);

// ln C(n, k) for 0 <= k <= n.
double log_binomial(int n, int k);

// <j1 m1; j2 m2 | J M>. Zero when a selection rule fails; throws
// std::domain_error for an invalid (j, m) pair.
double clebsch_gordan(HalfInt j1, HalfInt m1, HalfInt j2, HalfInt m2, HalfInt J, HalfInt M);

// d^j_{m,mp}(beta).
double wigner_small_d(HalfInt j, HalfInt m, HalfInt mp, double beta);

// Full (2j+1)x(2j+1) d-matrix, rows m and columns m' ascending.
RealMatrix wigner_small_d_matrix(HalfInt j, double beta);

// Y_{j,m}(theta, phi).
Complex spherical_harmonic(int j, int m, double theta, double phi);

// Normalized associated Legendre values P_j^m(cos theta) for 0 <= m <= j <= jmax,
// so that Y_{j,m} = P_j^m e^{i m phi}. Entry (j, m); upper triangle is zero.
RealMatrix normalized_legendre_table(int jmax, double theta);

// D^{N/2}_{m,m'}(alpha, beta, gamma) = e^{-i alpha m} d_{m,m'}(beta) e^{-i gamma m'}.
ComplexMatrix wigner_rotation_matrix(int n_photons, double alpha, double beta, double gamma);

// Gauss-Legendre rule on [-1, 1], nodes ascending.
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussLegendre gauss_legendre(int n);

}  // namespace lossyint
