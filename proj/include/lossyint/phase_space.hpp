#pragma once

#include <memory>
#include <span>
#include <vector>

#include "lossyint/spin_space.hpp"
#include "lossyint/types.hpp"

// Spin Wigner functions on the unit sphere.
//
// W(theta, phi) = Tr[w_N(theta, phi) rho], with the kernel operator
//   <J,m2| w_N |J,m1> = sqrt(4 pi) sum_{j=0}^{N} sqrt(2j+1)/(N+1)
//                        C^{J m1}_{J m2, j (m1-m2)} Y_{j, m1-m2}(theta, phi).
// Fields integrate to 4 pi/(N+1) and satisfy
//   Tr[AB] = (N+1)/(4 pi) int W_A W_B dOmega.

namespace lossyint {

// Product quadrature: Gauss-Legendre in cos(theta), uniform in phi.
class SphereGrid {
 public:
  SphereGrid(int n_theta, int n_phi);

  // 2(N+1) polar and 4(N+1) azimuthal nodes.
  static std::shared_ptr<const SphereGrid> for_photons(int n_photons);

  int n_theta() const { return static_cast<int>(theta_.size()); }
  int n_phi() const { return static_cast<int>(phi_.size()); }
  // Largest N whose fields and kernels integrate exactly in pairs.
  int n_max() const;

  const std::vector<double>& theta_nodes() const { return theta_; }
  const std::vector<double>& theta_weights() const { return theta_weights_; }
  const std::vector<double>& phi_nodes() const { return phi_; }
  double phi_weight() const { return 2.0 * kPi / n_phi(); }
  double weight(int i_theta) const { return theta_weights_[i_theta] * phi_weight(); }

  // Throws std::domain_error if fields of n_photons are not resolved exactly.
  void require(int n_photons) const;

  bool operator==(const SphereGrid& other) const;

 private:
  std::vector<double> theta_;
  std::vector<double> theta_weights_;
  std::vector<double> phi_;
};

using GridPtr = std::shared_ptr<const SphereGrid>;

// Theta-dependent part of the Wigner kernel for one photon number. The
// Clebsch-Gordan sums are tabulated once; <m2|w|m1>(theta, phi) equals
// at_theta(theta)(m2, m1) * exp(i (m1 - m2) phi).
class WignerKernel {
 public:
  explicit WignerKernel(int n_photons);

  int n_photons() const { return n_photons_; }
  RealMatrix at_theta(double theta) const;
  ComplexMatrix at(double theta, double phi) const;

 private:
  int n_photons_;
  // coefficients_[(row * dim + col) * dim + j]
  std::vector<double> coefficients_;
};

// Shared, immutable kernel table for n_photons.
const WignerKernel& wigner_kernel(int n_photons);

// <J,m2| w_N(theta, phi) |J,m1>, rows m2, columns m1.
ComplexMatrix wigner_kernel_matrix(int n_photons, double theta, double phi);

struct WignerField {
  int n_photons = 0;
  GridPtr grid;
  RealMatrix values;  // (theta index, phi index)

  double integral() const;
};

// Wigner transform of any Hermitian operator on the N-photon space.
WignerField wigner_transform(const ComplexMatrix& op, const GridPtr& grid);
WignerField wigner_function(const SpinDensity& rho, const GridPtr& grid);

// Pointwise evaluation off the grid.
double wigner_value(const ComplexMatrix& op, double theta, double phi);

// W(pi/2, phi_j) at phi_j = 2 pi j / n_samples.
std::vector<double> equator_cut(const ComplexMatrix& op, int n_samples);

// |c_k| for k = 0..n/2, c_k = (1/n) sum_j f_j exp(-i k phi_j) over uniform
// periodic samples; for real data |c_k| = |c_-k|.
std::vector<double> azimuthal_amplitudes(std::span<const double> samples);

// (N+1)/(4 pi) int W w_N dOmega by quadrature.
ComplexMatrix inverse_wigner_operator(const WignerField& field);
SpinDensity inverse_wigner(const WignerField& field);

// (N+1)/(4 pi) int W_A W_B dOmega. Throws std::domain_error on mismatched N or grid.
double overlap_trace(const WignerField& a, const WignerField& b);

// dW/dphi, evaluated analytically from the azimuthal Fourier structure.
WignerField phi_derivative(const ComplexMatrix& op, const GridPtr& grid);
WignerField phi_derivative(const SpinDensity& rho, const GridPtr& grid);

// Spherical-harmonic coefficients a_{j,m} = int W conj(Y_{j,m}) dOmega.
class HarmonicExpansion {
 public:
  explicit HarmonicExpansion(int degree_max);

  int degree_max() const { return degree_max_; }
  Complex& operator()(int j, int m) { return coefficients_[j * j + j + m]; }
  Complex operator()(int j, int m) const { return coefficients_[j * j + j + m]; }
  // Largest |a_{j,m}| with j > degree.
  double tail_above(int degree) const;

 private:
  int degree_max_;
  std::vector<Complex> coefficients_;
};

// Throws std::domain_error if the grid cannot integrate W Y exactly up to degree_max.
HarmonicExpansion expand_field(const WignerField& field, int degree_max);
WignerField synthesize_field(const HarmonicExpansion& expansion, int n_photons, const GridPtr& grid);

}  // namespace lossyint
