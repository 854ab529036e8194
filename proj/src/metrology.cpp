#include "lossyint/metrology.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace lossyint {

namespace {

constexpr double kRelativeEigenCutoff = 1e-12;
constexpr double kPurityDriftTolerance = 1e-12;

template <typename Matrix>
double qfi_spectral_impl(const Matrix& rho) {
  const int dim = static_cast<int>(rho.rows());
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho);
  const RealVector& lambda = es.eigenvalues();
  const double cutoff = kRelativeEigenCutoff * std::max(lambda.maxCoeff(), 0.0);
  // generator n_a in the eigenbasis
  const RealVector n = RealVector::LinSpaced(dim, 0.0, dim - 1.0);
  const Matrix g = es.eigenvectors().adjoint() * n.asDiagonal() * es.eigenvectors();
  double f = 0.0;
  for (int k = 0; k < dim; ++k) {
    for (int l = k + 1; l < dim; ++l) {
      const double sum = lambda(k) + lambda(l);
      if (sum <= cutoff) continue;
      const double diff = lambda(k) - lambda(l);
      f += 2.0 * diff * diff / sum * std::norm(g(k, l));
    }
  }
  return 2.0 * f;
}

}  // namespace

double qfi_pure(const SpinKet& state) {
  const RealVector n = number_operator_a(state.n_photons());
  const RealVector p = state.amplitudes().cwiseAbs2();
  const double mean = p.dot(n);
  return 4.0 * p.dot((n.array() - mean).square().matrix());
}

double qfi_spectral(const ComplexMatrix& rho) { return qfi_spectral_impl(rho); }
double qfi_spectral(const RealMatrix& rho) { return qfi_spectral_impl(rho); }

double qfi_mixed(const SpinDensity& rho) {
  if (rho.eigenvalues().minCoeff() < kPositivityTolerance)
    throw std::domain_error("qfi_mixed needs a positive semidefinite input");
  return qfi_spectral(rho.matrix());
}

LossyQfi::LossyQfi(int n_photons, double eta) : n_photons_(n_photons), eta_(eta) {
  if (n_photons < 0) throw std::domain_error("negative photon number");
  if (!(eta >= 0.0 && eta <= 1.0)) throw std::domain_error("transmission must lie in [0, 1]");
  for (int l = 0; l <= n_photons; ++l) {
    const double p = loss_probability(n_photons, l, eta);
    probabilities_.push_back(p);
    maps_.emplace_back(n_photons, l);
  }
}

template <typename Vector>
double LossyQfi::evaluate(const Vector& amplitudes, std::vector<double>* terms) const {
  using Scalar = typename Vector::Scalar;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (amplitudes.size() != n_photons_ + 1) throw std::invalid_argument("amplitude vector has wrong length");
  const double norm2 = amplitudes.squaredNorm();
  if (!(norm2 > 0.0)) throw std::invalid_argument("zero amplitude vector");
  if (terms) terms->assign(n_photons_ + 1, 0.0);
  double total = 0.0;
  for (int lost = 0; lost <= n_photons_; ++lost) {
    const double p = probabilities_[lost];
    if (p == 0.0) continue;
    const int n_out = n_photons_ - lost;
    if (n_out == 0) continue;  // vacuum carries no phase information
    // Lambda(|psi><psi|) = V V^dagger with column l the image of psi under
    // the l-th weighted monomial.
    Matrix v(n_out + 1, lost + 1);
    for (int l = 0; l <= lost; ++l)
      v.col(l) = maps_[lost].weights(l).segment(l, n_out + 1).cwiseProduct(amplitudes.segment(l, n_out + 1));
    const Matrix rho = v * v.adjoint() / norm2;
    const double term = p * qfi_spectral_impl(rho);
    if (terms) (*terms)[lost] = term;
    total += term;
  }
  return total;
}

double LossyQfi::operator()(const ComplexVector& amplitudes) const { return evaluate(amplitudes, nullptr); }
double LossyQfi::operator()(const RealVector& amplitudes) const { return evaluate(amplitudes, nullptr); }

std::vector<double> LossyQfi::branch_terms(const ComplexVector& amplitudes) const {
  std::vector<double> terms;
  evaluate(amplitudes, &terms);
  return terms;
}

double qfi_lossy(const SpinKet& state, double eta) {
  return LossyQfi(state.n_photons(), eta)(state.amplitudes());
}

double asymptotic_precision(int n_photons, double eta) {
  if (n_photons < 1) throw std::domain_error("asymptotic precision needs N >= 1");
  if (!(eta > 0.0 && eta < 1.0)) throw std::domain_error("asymptotic precision needs 0 < eta < 1");
  return std::sqrt((1.0 - eta) / (eta * n_photons));
}

double superfidelity_qfi_bound(const SpinDensity& rho) {
  const ComplexMatrix& r = rho.matrix();
  const int dim = static_cast<int>(r.rows());
  ComplexMatrix dr(dim, dim);
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b) dr(a, b) = Complex(0.0, -(a - b)) * r(a, b);
  // d/dvarphi Tr[rho^2] = 2 Tr[rho d rho]
  const double purity_drift = 2.0 * std::abs((r * dr).trace());
  if (purity_drift > kPurityDriftTolerance) throw std::logic_error("purity not conserved under the phase shift");
  return 2.0 * (dr * dr).trace().real();
}

double wigner_qfi_bound(const SpinKet& state, double eta, std::span<const GridPtr> grids) {
  const int n = state.n_photons();
  if (!grids.empty() && static_cast<int>(grids.size()) != n + 1)
    throw std::domain_error("need one grid per remaining photon number 0..N");
  const SpinDensity rho = SpinDensity::from_ket(state);
  double total = 0.0;
  for (int kept = 0; kept <= n; ++kept) {
    const int lost = n - kept;
    const double p = loss_probability(n, lost, eta);
    const GridPtr grid = grids.empty() ? SphereGrid::for_photons(kept) : grids[kept];
    if (!grid) throw std::domain_error("null grid");
    grid->require(kept);
    if (p == 0.0) continue;
    const WignerField dw = phi_derivative(conditional_loss_map(rho, lost), grid);
    total += p * overlap_trace(dw, dw);
  }
  return 2.0 * total;
}

PrecisionRecord make_precision_record(const SpinKet& state, double eta) {
  PrecisionRecord rec;
  rec.n_photons = state.n_photons();
  rec.eta = eta;
  rec.fisher = qfi_lossy(state, eta);
  rec.delta_phi = rec.fisher > 0.0 ? 1.0 / std::sqrt(rec.fisher) : std::numeric_limits<double>::infinity();
  rec.bound_asymptotic = (eta > 0.0 && eta < 1.0 && rec.n_photons >= 1)
                             ? asymptotic_precision(rec.n_photons, eta)
                             : std::numeric_limits<double>::quiet_NaN();
  rec.bound_wigner = wigner_qfi_bound(state, eta);
  return rec;
}

}  // namespace lossyint
