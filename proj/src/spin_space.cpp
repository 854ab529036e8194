#include "lossyint/spin_space.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "lossyint/special_functions.hpp"

namespace lossyint {

SpinKet::SpinKet(ComplexVector amplitudes) : amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() == 0) throw std::invalid_argument("SpinKet needs at least one amplitude");
  const double norm2 = amplitudes_.squaredNorm();
  if (std::abs(norm2 - 1.0) > kNormalizationTolerance)
    throw std::invalid_argument("SpinKet not normalized: |c|^2 = " + std::to_string(norm2));
}

SpinKet SpinKet::normalized(ComplexVector amplitudes) {
  const double n = amplitudes.norm();
  if (!(n > 0.0)) throw std::invalid_argument("cannot normalize a zero vector");
  amplitudes /= n;
  return SpinKet(std::move(amplitudes));
}

SpinKet SpinKet::basis(int n_photons, int index) {
  if (n_photons < 0 || index < 0 || index > n_photons) throw std::domain_error("basis index out of range");
  ComplexVector v = ComplexVector::Zero(n_photons + 1);
  v(index) = 1.0;
  return SpinKet(std::move(v));
}

SpinDensity::SpinDensity(ComplexMatrix matrix) : matrix_(std::move(matrix)) {
  if (matrix_.rows() == 0 || matrix_.rows() != matrix_.cols())
    throw std::invalid_argument("SpinDensity must be a non-empty square matrix");
  const double herm = (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
  if (herm > kNormalizationTolerance) throw std::invalid_argument("SpinDensity not Hermitian");
  const Complex tr = matrix_.trace();
  if (std::abs(tr - 1.0) > kNormalizationTolerance)
    throw std::invalid_argument("SpinDensity trace is " + std::to_string(tr.real()));
  if (eigenvalues().minCoeff() < kPositivityTolerance) throw std::invalid_argument("SpinDensity not positive");
}

SpinDensity SpinDensity::from_ket(const SpinKet& ket) {
  return SpinDensity(ket.amplitudes() * ket.amplitudes().adjoint(), Unchecked{});
}

SpinDensity SpinDensity::maximally_mixed(int n_photons) {
  if (n_photons < 0) throw std::domain_error("negative photon number");
  const int dim = n_photons + 1;
  return SpinDensity(ComplexMatrix::Identity(dim, dim) / static_cast<double>(dim), Unchecked{});
}

SpinDensity SpinDensity::trusted(ComplexMatrix matrix) { return SpinDensity(std::move(matrix), Unchecked{}); }

double SpinDensity::purity() const { return (matrix_ * matrix_).trace().real(); }

RealVector SpinDensity::eigenvalues() const {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(matrix_, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

RealVector number_operator_a(int n_photons) {
  if (n_photons < 0) throw std::domain_error("negative photon number");
  return RealVector::LinSpaced(n_photons + 1, 0.0, static_cast<double>(n_photons));
}

SpinKet phase_shift(const SpinKet& state, double varphi) {
  ComplexVector c = state.amplitudes();
  for (int k = 0; k < c.size(); ++k) c(k) *= std::exp(Complex(0.0, -varphi * k));
  return SpinKet(std::move(c));
}

SpinDensity phase_shift(const SpinDensity& state, double varphi) {
  ComplexMatrix r = state.matrix();
  for (int a = 0; a < r.rows(); ++a)
    for (int b = 0; b < r.cols(); ++b) r(a, b) *= std::exp(Complex(0.0, -varphi * (a - b)));
  return SpinDensity::trusted(std::move(r));
}

RealMatrix monomial_lower(int n_photons, int l, int k) {
  if (l < 0 || k < 0 || l + k > n_photons) throw std::domain_error("monomial order exceeds photon number");
  // a^l b^k |na, nb> = sqrt(na!/(na-l)! nb!/(nb-k)!) |na-l, nb-k>, and index = na.
  const int n_out = n_photons - l - k;
  RealMatrix m = RealMatrix::Zero(n_out + 1, n_photons + 1);
  for (int na = l; na <= n_photons; ++na) {
    const int nb = n_photons - na;
    if (nb < k) continue;
    m(na - l, na) = std::exp(0.5 * (log_factorial(na) - log_factorial(na - l) + log_factorial(nb) -
                                    log_factorial(nb - k)));
  }
  return m;
}

SpinKet noon_state(int n_photons) {
  if (n_photons < 1) throw std::domain_error("N00N state needs N >= 1");
  ComplexVector c = ComplexVector::Zero(n_photons + 1);
  c(0) = c(n_photons) = 1.0 / std::sqrt(2.0);
  return SpinKet(std::move(c));
}

SpinDensity su2_rotate(const SpinDensity& state, double alpha, double beta, double gamma) {
  const ComplexMatrix d = wigner_rotation_matrix(state.n_photons(), alpha, beta, gamma);
  return SpinDensity::trusted(d * state.matrix() * d.adjoint());
}

}  // namespace lossyint
