#pragma once

#include <span>
#include <vector>

#include "lossyint/loss_channel.hpp"
#include "lossyint/phase_space.hpp"
#include "lossyint/spin_space.hpp"

// Quantum Fisher information for the phase family exp(-i varphi n_a), with
// and without equal-arm loss, plus two lower bounds built from quadratic
// traces (operator form and phase-space form).

namespace lossyint {

// 4 Var(n_a).
double qfi_pure(const SpinKet& state);

// 2 sum_{k,l} (l_k - l_l)^2/(l_k + l_l) |<k|n_a|l>|^2 over pairs with
// l_k + l_l > 1e-12 * max eigenvalue. Throws std::domain_error when the
// input has an eigenvalue below kPositivityTolerance.
double qfi_mixed(const SpinDensity& rho);

// Same spectral formula on a raw Hermitian PSD matrix.
double qfi_spectral(const ComplexMatrix& rho);
double qfi_spectral(const RealMatrix& rho);

// Lossy QFI of pure N-photon inputs at fixed eta: the conditional maps and
// binomial weights are built once and reused across evaluations.
class LossyQfi {
 public:
  LossyQfi(int n_photons, double eta);

  int n_photons() const { return n_photons_; }
  double eta() const { return eta_; }

  // sum_L p_L F_Q[Lambda_L(|psi><psi|)]; amplitudes need not be normalized.
  double operator()(const ComplexVector& amplitudes) const;
  double operator()(const RealVector& amplitudes) const;

  // Per-branch contributions p_L F_Q, indexed by L.
  std::vector<double> branch_terms(const ComplexVector& amplitudes) const;

 private:
  template <typename Vector>
  double evaluate(const Vector& amplitudes, std::vector<double>* terms) const;

  int n_photons_;
  double eta_;
  std::vector<double> probabilities_;
  std::vector<ConditionalLossMap> maps_;
};

double qfi_lossy(const SpinKet& state, double eta);

// sqrt((1-eta)/(eta N)). Throws std::domain_error unless 0 < eta < 1 and N >= 1.
double asymptotic_precision(int n_photons, double eta);

// 2 Tr[(d rho/d varphi)^2] with d rho/d varphi = -i [n_a, rho]. The purity
// derivative term vanishes for this family; a nonzero value (> 1e-12)
// throws std::logic_error.
double superfidelity_qfi_bound(const SpinDensity& rho);

// 2 sum_{N'} p^N_{N-N'} (N'+1)/(4 pi) int (dW^{N'}/dphi)^2 dOmega over the loss
// branches. grids[N'] is used for the branch with N' photons; an empty span
// selects SphereGrid::for_photons. Throws std::domain_error on a grid that
// does not resolve its branch.
double wigner_qfi_bound(const SpinKet& state, double eta, std::span<const GridPtr> grids = {});

struct OptimizerMeta {
  int restarts = 0;
  long iterations = 0;
  long evaluations = 0;
  bool converged = false;
};

struct PrecisionRecord {
  int n_photons = 0;
  double eta = 1.0;
  double fisher = 0.0;
  double delta_phi = 0.0;         // 1/sqrt(fisher)
  double bound_asymptotic = 0.0;  // NaN when eta is 0 or 1
  double bound_wigner = 0.0;
  OptimizerMeta optimizer;
};

// Fills every field except optimizer from a state.
PrecisionRecord make_precision_record(const SpinKet& state, double eta);

}  // namespace lossyint
