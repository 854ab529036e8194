#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "lossyint/phase_space.hpp"

// Photon loss as a convolution on the sphere.
//
// The Wigner function after losing L of N photons is
//   W'(Omega) = int K^N_L(angle(Omega, Omega')) W(Omega') dOmega',
// with the zonal kernel
//   K^N_L(theta) = (N+1)/(4 pi) Tr[w_{N-L}(theta, 0) Lambda^N_L(w_N(north pole))].

namespace lossyint {

enum class KernelKind { exact, asymptotic, order0 };

std::string to_string(KernelKind kind);

struct KernelProfile {
  int n_input = 0;
  int n_lost = 0;
  KernelKind kind = KernelKind::exact;
  std::vector<double> thetas;
  std::vector<double> values;
  // Factor applied to force the sphere integral to (N+1)/(N-L+1); 1 for exact.
  double rescale_factor = 1.0;
};

// Diagonal of Lambda^N_L(w_N(north pole)) on the N-L photon space.
RealVector lost_pole_kernel(int n_input, int n_lost);

// Exact kernel at (theta, phi) via the full trace; independent of phi.
double exact_kernel_value(int n_input, int n_lost, double theta, double phi);

// Throws std::domain_error for L outside [0, N].
KernelProfile exact_kernel_profile(int n_input, int n_lost, std::span<const double> thetas);

// int K dOmega for the exact kernel, by Gauss-Legendre quadrature in cos(theta).
double exact_kernel_integral(int n_input, int n_lost);

// (N+1)/(2 sqrt(pi)) Gamma(K+1/2)/Gamma(K+1) int_{-1}^{1} (1-x^2)^K (cos t + i x sin t)^(N-2K) dx,
// by max(64, N)-point Gauss-Legendre quadrature. Throws std::domain_error
// unless 0 <= 2K <= N; std::runtime_error if the imaginary part survives.
double order0_kernel(int n_input, int half_lost, double theta);

// How 2K is chosen for odd L in the asymptotic kernel. continuous sets 2K = L
// and evaluates the order-0 integral at half-integer K; lower_bracket uses
// 2K = L - 1. Even L always uses 2K = L.
enum class OddLossRule { continuous, lower_bracket };

// Large-N form (N+1)/(4 pi) [1 + (N-2K)/N cos(theta) + 2K/N] order0(N, K, theta),
// rescaled to integrate to (N+1)/(N-L+1). Meaningful when N, L and N - L are
// all large.
KernelProfile asymptotic_kernel_profile(int n_input, int n_lost, std::span<const double> thetas,
                                        OddLossRule rule = OddLossRule::continuous);

// Funk-Hecke multipliers lambda_j = 2 pi int K(t) P_j(t) dt of the exact kernel, j = 0..N.
RealVector kernel_legendre_multipliers(int n_input, int n_lost);

// Applies the loss of L photons to a field on N photons in harmonic space and
// samples the result on output_grid (SphereGrid::for_photons(N - L) when null).
// Throws std::domain_error if the input grid cannot expand to degree N.
WignerField convolve_loss(const WignerField& field, int n_lost, GridPtr output_grid = nullptr);

// Full width at half maximum of a profile peaked at theta = 0: twice the
// first crossing of half the peak value, bracketed by a scan and refined by
// bisection.
double full_width_half_max(const std::function<double(double)>& profile, double theta_max = kPi);

// sigma of exp(-sin^2(theta) / (2 sigma^2)) fitted by least squares to
// ln(profile/profile(0)) over the region where the profile exceeds
// floor_fraction of its peak.
double fitted_gaussian_width(const std::function<double(double)>& profile, double floor_fraction = 0.1);

struct KernelWidths {
  double fwhm_exact = 0.0;
  double fwhm_asymptotic = 0.0;
  double sigma_exact = 0.0;
  double sigma_asymptotic = 0.0;
};

// FWHM and fitted Gaussian widths of the exact and asymptotic kernels for (N, L).
KernelWidths compare_kernel_widths(int n_input, int n_lost, OddLossRule rule = OddLossRule::continuous);

}  // namespace lossyint
