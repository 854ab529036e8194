#include "lossyint/loss_channel.hpp"

#include <cmath>
#include <stdexcept>

#include "lossyint/special_functions.hpp"

namespace lossyint {

double loss_probability(int n_photons, int n_lost, double eta) {
  if (n_photons < 0 || n_lost < 0 || n_lost > n_photons)
    throw std::domain_error("lost photon count out of range");
  if (!(eta >= 0.0 && eta <= 1.0)) throw std::domain_error("transmission must lie in [0, 1]");
  const int kept = n_photons - n_lost;
  if (eta == 1.0) return n_lost == 0 ? 1.0 : 0.0;
  if (eta == 0.0) return kept == 0 ? 1.0 : 0.0;
  return std::exp(log_binomial(n_photons, n_lost) + kept * std::log(eta) + n_lost * std::log1p(-eta));
}

ConditionalLossMap::ConditionalLossMap(int n_input, int n_lost) : n_input_(n_input), n_lost_(n_lost) {
  if (n_input < 0 || n_lost < 0 || n_lost > n_input) throw std::domain_error("lost photon count out of range");
  const double log_norm = log_factorial(n_input - n_lost) - log_factorial(n_input);
  weights_.reserve(n_lost + 1);
  for (int l = 0; l <= n_lost; ++l) {
    const int k = n_lost - l;
    RealVector w = RealVector::Zero(n_input + 1);
    const double base = log_norm + log_binomial(n_lost, l);
    for (int na = l; na <= n_input; ++na) {
      const int nb = n_input - na;
      if (nb < k) continue;
      w(na) = std::exp(0.5 * (base + log_factorial(na) - log_factorial(na - l) + log_factorial(nb) -
                              log_factorial(nb - k)));
    }
    weights_.push_back(std::move(w));
  }
}

template <typename Matrix>
Matrix ConditionalLossMap::apply_impl(const Matrix& op) const {
  if (op.rows() != n_input_ + 1 || op.cols() != n_input_ + 1)
    throw std::invalid_argument("operator dimension does not match the map input");
  const int n_out = n_output();
  Matrix out = Matrix::Zero(n_out + 1, n_out + 1);
  for (int l = 0; l <= n_lost_; ++l) {
    // rows/cols i with w_l(i) != 0 are exactly l .. l + n_out
    const RealVector w = weights_[l].segment(l, n_out + 1);
    out.noalias() += (w.asDiagonal() * op.block(l, l, n_out + 1, n_out + 1) * w.asDiagonal()).eval();
  }
  return out;
}

ComplexMatrix ConditionalLossMap::apply(const ComplexMatrix& op) const { return apply_impl(op); }
RealMatrix ConditionalLossMap::apply(const RealMatrix& op) const { return apply_impl(op); }

SpinDensity conditional_loss_map(const SpinDensity& rho, int n_lost) {
  if (n_lost < 0 || n_lost > rho.n_photons()) throw std::domain_error("cannot lose more photons than present");
  const ConditionalLossMap map(rho.n_photons(), n_lost);
  return SpinDensity::trusted(map.apply(rho.matrix()));
}

LossEnsemble full_loss_ensemble(const SpinDensity& rho, double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw std::domain_error("transmission must lie in [0, 1]");
  const int n = rho.n_photons();
  LossEnsemble ens{n, eta, {}};
  ens.branches.reserve(n + 1);
  for (int l = 0; l <= n; ++l)
    ens.branches.push_back({l, loss_probability(n, l, eta), conditional_loss_map(rho, l)});
  return ens;
}

FockSpace::FockSpace(int max_total) : max_total_(max_total) {
  if (max_total < 0) throw std::domain_error("negative Fock truncation");
}

int FockSpace::index(int na, int nb) const {
  if (na < 0 || nb < 0 || na + nb > max_total_) throw std::domain_error("Fock state outside truncation");
  const int n = na + nb;
  return n * (n + 1) / 2 + na;
}

ComplexMatrix FockSpace::embed(const ComplexMatrix& spin_op) const {
  const int n = static_cast<int>(spin_op.rows()) - 1;
  if (n > max_total_) throw std::domain_error("state exceeds Fock truncation");
  ComplexMatrix out = ComplexMatrix::Zero(dimension(), dimension());
  for (int a = 0; a <= n; ++a)
    for (int b = 0; b <= n; ++b) out(index(a, n - a), index(b, n - b)) = spin_op(a, b);
  return out;
}

ComplexMatrix FockSpace::block(const ComplexMatrix& fock_op, int n_photons) const {
  ComplexMatrix out(n_photons + 1, n_photons + 1);
  for (int a = 0; a <= n_photons; ++a)
    for (int b = 0; b <= n_photons; ++b)
      out(a, b) = fock_op(index(a, n_photons - a), index(b, n_photons - b));
  return out;
}

namespace {

// Single-mode Kraus operator for mode a (arm == 0) or b (arm == 1).
ComplexMatrix single_mode_kraus(const FockSpace& space, int arm, int lost, double eta) {
  const int dim = space.dimension();
  ComplexMatrix k = ComplexMatrix::Zero(dim, dim);
  const int t = space.max_total();
  for (int na = 0; na <= t; ++na) {
    for (int nb = 0; na + nb <= t; ++nb) {
      const int n = arm == 0 ? na : nb;
      if (n < lost) continue;
      const int na_out = arm == 0 ? na - lost : na;
      const int nb_out = arm == 0 ? nb : nb - lost;
      const int remaining = n - lost;
      // (1-eta)^(l/2) / sqrt(l!) * sqrt(n!/(n-l)!) * eta^((n-l)/2)
      double amp = std::sqrt(std::exp(log_factorial(n) - log_factorial(remaining) - log_factorial(lost)));
      amp *= std::pow(1.0 - eta, 0.5 * lost) * std::pow(eta, 0.5 * remaining);
      k(space.index(na_out, nb_out), space.index(na, nb)) = amp;
    }
  }
  return k;
}

}  // namespace

ComplexMatrix kraus_oracle(const FockSpace& space, const ComplexMatrix& rho_fock, double eta) {
  if (space.max_total() > kKrausOracleMaxPhotons) throw std::domain_error("Kraus oracle truncation exceeded");
  if (!(eta >= 0.0 && eta <= 1.0)) throw std::domain_error("transmission must lie in [0, 1]");
  if (rho_fock.rows() != space.dimension() || rho_fock.cols() != space.dimension())
    throw std::invalid_argument("operator does not match Fock space");
  const int t = space.max_total();
  std::vector<ComplexMatrix> ka, kb;
  for (int l = 0; l <= t; ++l) {
    ka.push_back(single_mode_kraus(space, 0, l, eta));
    kb.push_back(single_mode_kraus(space, 1, l, eta));
  }
  ComplexMatrix out = ComplexMatrix::Zero(space.dimension(), space.dimension());
  for (int total = 0; total <= t; ++total) {
    for (int l = 0; l <= total; ++l) {
      const ComplexMatrix k = ka[l] * kb[total - l];
      out += k * rho_fock * k.adjoint();
    }
  }
  return out;
}

}  // namespace lossyint
