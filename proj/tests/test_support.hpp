#pragma once

#include <random>

#include <Eigen/QR>

#include "lossyint/spin_space.hpp"
#include "lossyint/types.hpp"

namespace lossyint::testing {

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64(seed); }

inline ComplexVector random_vector(int dim, std::mt19937_64& gen) {
  std::normal_distribution<double> normal(0.0, 1.0);
  ComplexVector v(dim);
  for (int i = 0; i < dim; ++i) v(i) = Complex(normal(gen), normal(gen));
  return v;
}

inline SpinKet random_ket(int n_photons, std::mt19937_64& gen) {
  return SpinKet::normalized(random_vector(n_photons + 1, gen));
}

// Mixture of `rank` random pure states with random weights.
inline SpinDensity random_density(int n_photons, std::mt19937_64& gen, int rank = 3) {
  std::uniform_real_distribution<double> uniform(0.1, 1.0);
  ComplexMatrix m = ComplexMatrix::Zero(n_photons + 1, n_photons + 1);
  for (int r = 0; r < rank; ++r) {
    const ComplexVector v = random_vector(n_photons + 1, gen);
    m += uniform(gen) * v * v.adjoint();
  }
  m /= m.trace().real();
  return SpinDensity(0.5 * (m + m.adjoint()));
}

inline ComplexMatrix random_hermitian(int dim, std::mt19937_64& gen) {
  const ComplexVector a = random_vector(dim * dim, gen);
  const ComplexMatrix m = Eigen::Map<const ComplexMatrix>(a.data(), dim, dim);
  return 0.5 * (m + m.adjoint());
}

inline double max_abs(const ComplexMatrix& m) { return m.cwiseAbs().maxCoeff(); }

// Solves rho L + L rho = 2 d rho for the SLD by minimum-norm least squares on
// the vectorized equation and returns Tr[d rho L].
inline double sld_oracle(const ComplexMatrix& rho) {
  const int d = static_cast<int>(rho.rows());
  ComplexMatrix drho(d, d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) drho(a, b) = Complex(0.0, -(a - b)) * rho(a, b);
  ComplexMatrix sys = ComplexMatrix::Zero(d * d, d * d);
  const ComplexMatrix id = ComplexMatrix::Identity(d, d);
  // column-major vec: vec(rho L) = (I kron rho) vec L, vec(L rho) = (rho^T kron I) vec L
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) {
      sys.block(r * d, c * d, d, d) += id(r, c) * rho;
      sys.block(r * d, c * d, d, d) += rho(c, r) * id;
    }
  const ComplexVector rhs = 2.0 * Eigen::Map<const ComplexVector>(drho.data(), d * d);
  Eigen::CompleteOrthogonalDecomposition<ComplexMatrix> cod(sys);
  cod.setThreshold(1e-12);
  const ComplexVector l = cod.solve(rhs);
  const ComplexMatrix sld = Eigen::Map<const ComplexMatrix>(l.data(), d, d);
  return (drho * sld).trace().real();
}

inline double uniform_angle(std::mt19937_64& gen, double hi) {
  return std::uniform_real_distribution<double>(0.0, hi)(gen);
}

}  // namespace lossyint::testing
