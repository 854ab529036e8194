#pragma once

#include <span>
#include <vector>

#include "lossyint/types.hpp"

// Fixed-photon-number two-mode states in the angular momentum basis.
//
// An N-photon state lives in the spin-J representation with J = N/2. Basis
// index k = 0..N corresponds to m = k - J, i.e. |J,m> = |(J+m)_a (J-m)_b>:
// index k carries k photons in arm a and N - k in arm b.

namespace lossyint {

// Tolerance applied by constructors to the norm/trace of incoming states.
inline constexpr double kNormalizationTolerance = 1e-9;
// Smallest eigenvalue accepted for a density matrix.
inline constexpr double kPositivityTolerance = -1e-10;

class SpinKet {
 public:
  // Throws std::invalid_argument if the amplitude norm deviates from one by
  // more than kNormalizationTolerance. Amplitudes are ordered by ascending m.
  explicit SpinKet(ComplexVector amplitudes);

  // Normalizes first; throws if the vector is zero.
  static SpinKet normalized(ComplexVector amplitudes);
  static SpinKet basis(int n_photons, int index);

  int n_photons() const { return static_cast<int>(amplitudes_.size()) - 1; }
  const ComplexVector& amplitudes() const { return amplitudes_; }
  Complex operator[](int index) const { return amplitudes_(index); }

 private:
  ComplexVector amplitudes_;
};

class SpinDensity {
 public:
  // Validates Hermiticity, unit trace and positivity within tolerance.
  explicit SpinDensity(ComplexMatrix matrix);

  static SpinDensity from_ket(const SpinKet& ket);
  static SpinDensity maximally_mixed(int n_photons);
  // Skips validation; for matrices produced by maps already known to be
  // trace preserving and completely positive.
  static SpinDensity trusted(ComplexMatrix matrix);

  int n_photons() const { return static_cast<int>(matrix_.rows()) - 1; }
  const ComplexMatrix& matrix() const { return matrix_; }
  double purity() const;
  RealVector eigenvalues() const;

 private:
  struct Unchecked {};
  SpinDensity(ComplexMatrix matrix, Unchecked) : matrix_(std::move(matrix)) {}

  ComplexMatrix matrix_;
};

// Eigenvalues J+m of n_a, ascending m.
RealVector number_operator_a(int n_photons);

// exp(-i varphi n_a) acting on the state.
SpinKet phase_shift(const SpinKet& state, double varphi);
SpinDensity phase_shift(const SpinDensity& state, double varphi);

// Matrix of a^l b^k from the N-photon to the (N-l-k)-photon subspace,
// (N-l-k+1) x (N+1). Throws std::domain_error if l + k > N or either is negative.
RealMatrix monomial_lower(int n_photons, int l, int k);

// (|J,J> + |J,-J>)/sqrt(2). Throws std::domain_error for N = 0.
SpinKet noon_state(int n_photons);

// D rho D^dagger with D the spin-N/2 rotation for Euler angles (z-y-z).
SpinDensity su2_rotate(const SpinDensity& state, double alpha, double beta, double gamma);

}  // namespace lossyint
