#pragma once

#include <vector>

#include "lossyint/spin_space.hpp"
#include "lossyint/types.hpp"

// Equal-arm photon loss. An N-photon state with transmission eta in both arms
// becomes an incoherent mixture over the number L of lost photons: binomial
// weights p^N_L times trace-preserving maps from N to N-L photons.

namespace lossyint {

// C(N,L) eta^(N-L) (1-eta)^L. Throws std::domain_error outside 0 <= L <= N, 0 <= eta <= 1.
double loss_probability(int n_photons, int n_lost, double eta);

// Conditional map for the loss of exactly L out of N photons. Carries no eta.
//
// Lambda(X) = (N-L)!/N! sum_l C(L,l) (a^l b^(L-l)) X (a^l b^(L-l))^dagger. Each
// monomial maps basis index i (photons in arm a) to i - l, so the map is stored
// as one weight vector per l with every combinatorial factor folded in:
// Lambda(X)(i-l, j-l) += w_l(i) w_l(j) X(i, j).
class ConditionalLossMap {
 public:
  ConditionalLossMap(int n_input, int n_lost);

  int n_input() const { return n_input_; }
  int n_lost() const { return n_lost_; }
  int n_output() const { return n_input_ - n_lost_; }

  // Applies the map to an arbitrary operator on the N-photon space.
  ComplexMatrix apply(const ComplexMatrix& op) const;
  RealMatrix apply(const RealMatrix& op) const;

  // w_l over input basis indices; zero where the monomial annihilates.
  const RealVector& weights(int l) const { return weights_[l]; }

 private:
  template <typename Matrix>
  Matrix apply_impl(const Matrix& op) const;

  int n_input_;
  int n_lost_;
  std::vector<RealVector> weights_;
};

// Throws std::domain_error if L > N.
SpinDensity conditional_loss_map(const SpinDensity& rho, int n_lost);

struct LossBranch {
  int lost;
  double probability;
  SpinDensity state;
};

struct LossEnsemble {
  int n_input;
  double eta;
  std::vector<LossBranch> branches;  // ascending in lost, L = 0..N
};

LossEnsemble full_loss_ensemble(const SpinDensity& rho, double eta);

// Two-mode Fock space truncated at a total photon number. Basis |na, nb>
// with na + nb <= max_total, ordered by total photon number and then na.
class FockSpace {
 public:
  explicit FockSpace(int max_total);

  int max_total() const { return max_total_; }
  int dimension() const { return (max_total_ + 1) * (max_total_ + 2) / 2; }
  int index(int na, int nb) const;

  // Places an N-photon spin-space operator into the Fock space.
  ComplexMatrix embed(const ComplexMatrix& spin_op) const;
  // Extracts the block with exactly n_photons photons, in spin-space order.
  ComplexMatrix block(const ComplexMatrix& fock_op, int n_photons) const;

 private:
  int max_total_;
};

// Largest Fock truncation the Kraus oracle accepts.
inline constexpr int kKrausOracleMaxPhotons = 12;

// Applies the two-arm loss channel through its single-mode Kraus operators
// K_l = (1-eta)^(l/2)/sqrt(l!) eta^(n/2) a^l directly in the truncated Fock
// space. Test support for the spin-space maps above. Throws
// std::domain_error if the space exceeds kKrausOracleMaxPhotons.
ComplexMatrix kraus_oracle(const FockSpace& space, const ComplexMatrix& rho_fock, double eta);

}  // namespace lossyint
