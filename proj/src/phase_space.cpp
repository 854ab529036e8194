#include "lossyint/phase_space.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>

#include "lossyint/special_functions.hpp"

namespace lossyint {

namespace {

// Largest tolerated imaginary residue of a transform, relative to the operator scale.
constexpr double kImaginaryResidue = 1e-10;

double legendre_signed(const RealMatrix& p, int j, int m) {
  const int am = std::abs(m);
  const double v = p(j, am);
  return (m < 0 && am % 2 == 1) ? -v : v;
}

// Azimuthal Fourier sums S_mu(theta) = sum_{b - a = mu} K(a, b) op(b, a),
// indexed mu + N.
std::vector<Complex> azimuthal_modes(const RealMatrix& kernel, const ComplexMatrix& op) {
  const int n = static_cast<int>(op.rows()) - 1;
  std::vector<Complex> s(2 * n + 1, Complex(0.0, 0.0));
  for (int a = 0; a <= n; ++a)
    for (int b = 0; b <= n; ++b) s[b - a + n] += kernel(a, b) * op(b, a);
  return s;
}

double operator_scale(const ComplexMatrix& op) { return std::max(1.0, op.cwiseAbs().maxCoeff()); }

void check_square(const ComplexMatrix& op) {
  if (op.rows() == 0 || op.rows() != op.cols()) throw std::invalid_argument("operator must be square");
}

WignerField transform_impl(const ComplexMatrix& op, const GridPtr& grid, bool derivative) {
  check_square(op);
  if (!grid) throw std::invalid_argument("null grid");
  const int n = static_cast<int>(op.rows()) - 1;
  grid->require(n);
  const WignerKernel& kernel = wigner_kernel(n);
  const double tol = kImaginaryResidue * operator_scale(op);
  WignerField field{n, grid, RealMatrix(grid->n_theta(), grid->n_phi())};
  for (int i = 0; i < grid->n_theta(); ++i) {
    const std::vector<Complex> s = azimuthal_modes(kernel.at_theta(grid->theta_nodes()[i]), op);
    for (int k = 0; k < grid->n_phi(); ++k) {
      const double phi = grid->phi_nodes()[k];
      Complex w(0.0, 0.0);
      for (int mu = -n; mu <= n; ++mu) {
        Complex term = s[mu + n] * std::exp(Complex(0.0, mu * phi));
        if (derivative) term *= Complex(0.0, mu);
        w += term;
      }
      if (std::abs(w.imag()) > tol * (derivative ? std::max(1, n) : 1))
        throw std::runtime_error("Wigner transform has imaginary residue; operator not Hermitian?");
      field.values(i, k) = w.real();
    }
  }
  return field;
}

void check_same_support(const WignerField& a, const WignerField& b) {
  if (a.n_photons != b.n_photons) throw std::domain_error("fields have different photon numbers");
  if (!a.grid || !b.grid || !(*a.grid == *b.grid)) throw std::domain_error("fields live on different grids");
}

}  // namespace

SphereGrid::SphereGrid(int n_theta, int n_phi) {
  if (n_theta < 1 || n_phi < 1) throw std::domain_error("grid needs at least one node per direction");
  const GaussLegendre rule = gauss_legendre(n_theta);
  theta_.resize(n_theta);
  theta_weights_.resize(n_theta);
  // ascending theta means descending cos(theta)
  for (int i = 0; i < n_theta; ++i) {
    theta_[i] = std::acos(rule.nodes[n_theta - 1 - i]);
    theta_weights_[i] = rule.weights[n_theta - 1 - i];
  }
  phi_.resize(n_phi);
  for (int k = 0; k < n_phi; ++k) phi_[k] = 2.0 * kPi * k / n_phi;
}

std::shared_ptr<const SphereGrid> SphereGrid::for_photons(int n_photons) {
  if (n_photons < 0) throw std::domain_error("negative photon number");
  return std::make_shared<const SphereGrid>(2 * (n_photons + 1), 4 * (n_photons + 1));
}

int SphereGrid::n_max() const { return std::min(n_theta() - 1, (n_phi() - 1) / 2); }

void SphereGrid::require(int n_photons) const {
  if (n_photons > n_max())
    throw std::domain_error("grid " + std::to_string(n_theta()) + "x" + std::to_string(n_phi()) +
                            " resolves N <= " + std::to_string(n_max()) + ", need N = " +
                            std::to_string(n_photons));
}

bool SphereGrid::operator==(const SphereGrid& other) const {
  return n_theta() == other.n_theta() && n_phi() == other.n_phi();
}

WignerKernel::WignerKernel(int n_photons) : n_photons_(n_photons) {
  if (n_photons < 0) throw std::domain_error("negative photon number");
  const int dim = n_photons + 1;
  const HalfInt spin = half(n_photons);
  coefficients_.assign(static_cast<size_t>(dim) * dim * dim, 0.0);
  const double pref = std::sqrt(4.0 * kPi) / dim;
  for (int a = 0; a < dim; ++a) {      // m2
    for (int b = 0; b < dim; ++b) {    // m1
      const int mu = b - a;
      const HalfInt m2 = half(2 * a - n_photons), m1 = half(2 * b - n_photons);
      for (int j = std::abs(mu); j <= n_photons; ++j) {
        coefficients_[(static_cast<size_t>(a) * dim + b) * dim + j] =
            pref * std::sqrt(2.0 * j + 1.0) * clebsch_gordan(spin, m2, HalfInt(j), HalfInt(mu), spin, m1);
      }
    }
  }
}

RealMatrix WignerKernel::at_theta(double theta) const {
  const int dim = n_photons_ + 1;
  const RealMatrix p = normalized_legendre_table(n_photons_, theta);
  RealMatrix k(dim, dim);
  for (int a = 0; a < dim; ++a) {
    for (int b = 0; b < dim; ++b) {
      const int mu = b - a;
      const double* c = &coefficients_[(static_cast<size_t>(a) * dim + b) * dim];
      double s = 0.0;
      for (int j = std::abs(mu); j <= n_photons_; ++j) s += c[j] * legendre_signed(p, j, mu);
      k(a, b) = s;
    }
  }
  return k;
}

ComplexMatrix WignerKernel::at(double theta, double phi) const {
  const RealMatrix k = at_theta(theta);
  const int dim = n_photons_ + 1;
  ComplexMatrix out(dim, dim);
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b) out(a, b) = k(a, b) * std::exp(Complex(0.0, (b - a) * phi));
  return out;
}

const WignerKernel& wigner_kernel(int n_photons) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<const WignerKernel>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n_photons);
  if (it == cache.end()) it = cache.emplace(n_photons, std::make_unique<const WignerKernel>(n_photons)).first;
  return *it->second;
}

ComplexMatrix wigner_kernel_matrix(int n_photons, double theta, double phi) {
  return wigner_kernel(n_photons).at(theta, phi);
}

double WignerField::integral() const {
  double total = 0.0;
  for (int i = 0; i < grid->n_theta(); ++i) total += grid->weight(i) * values.row(i).sum();
  return total;
}

WignerField wigner_transform(const ComplexMatrix& op, const GridPtr& grid) { return transform_impl(op, grid, false); }

WignerField wigner_function(const SpinDensity& rho, const GridPtr& grid) {
  return transform_impl(rho.matrix(), grid, false);
}

double wigner_value(const ComplexMatrix& op, double theta, double phi) {
  check_square(op);
  const int n = static_cast<int>(op.rows()) - 1;
  const std::vector<Complex> s = azimuthal_modes(wigner_kernel(n).at_theta(theta), op);
  Complex w(0.0, 0.0);
  for (int mu = -n; mu <= n; ++mu) w += s[mu + n] * std::exp(Complex(0.0, mu * phi));
  return w.real();
}

std::vector<double> equator_cut(const ComplexMatrix& op, int n_samples) {
  check_square(op);
  if (n_samples < 1) throw std::invalid_argument("need at least one sample");
  const int n = static_cast<int>(op.rows()) - 1;
  const std::vector<Complex> s = azimuthal_modes(wigner_kernel(n).at_theta(kPi / 2.0), op);
  std::vector<double> out(n_samples);
  for (int k = 0; k < n_samples; ++k) {
    const double phi = 2.0 * kPi * k / n_samples;
    Complex w(0.0, 0.0);
    for (int mu = -n; mu <= n; ++mu) w += s[mu + n] * std::exp(Complex(0.0, mu * phi));
    out[k] = w.real();
  }
  return out;
}

std::vector<double> azimuthal_amplitudes(std::span<const double> samples) {
  const int n = static_cast<int>(samples.size());
  std::vector<double> out(n / 2 + 1);
  for (int k = 0; k <= n / 2; ++k) {
    Complex c(0.0, 0.0);
    for (int j = 0; j < n; ++j) c += samples[j] * std::exp(Complex(0.0, -2.0 * kPi * k * j / n));
    out[k] = std::abs(c) / n;
  }
  return out;
}

ComplexMatrix inverse_wigner_operator(const WignerField& field) {
  const int n = field.n_photons;
  const SphereGrid& grid = *field.grid;
  grid.require(n);
  const WignerKernel& kernel = wigner_kernel(n);
  const int dim = n + 1;
  ComplexMatrix rho = ComplexMatrix::Zero(dim, dim);
  std::vector<Complex> f(2 * n + 1);
  for (int i = 0; i < grid.n_theta(); ++i) {
    // f_mu = sum_k W(theta_i, phi_k) e^{i mu phi_k}
    for (int mu = -n; mu <= n; ++mu) {
      Complex acc(0.0, 0.0);
      for (int k = 0; k < grid.n_phi(); ++k)
        acc += field.values(i, k) * std::exp(Complex(0.0, mu * grid.phi_nodes()[k]));
      f[mu + n] = acc;
    }
    const RealMatrix kt = kernel.at_theta(grid.theta_nodes()[i]);
    const double w = grid.weight(i);
    for (int a = 0; a < dim; ++a)
      for (int b = 0; b < dim; ++b) rho(a, b) += w * kt(a, b) * f[b - a + n];
  }
  return rho * (dim / (4.0 * kPi));
}

SpinDensity inverse_wigner(const WignerField& field) { return SpinDensity(inverse_wigner_operator(field)); }

double overlap_trace(const WignerField& a, const WignerField& b) {
  check_same_support(a, b);
  const SphereGrid& grid = *a.grid;
  double total = 0.0;
  for (int i = 0; i < grid.n_theta(); ++i) total += grid.weight(i) * a.values.row(i).dot(b.values.row(i));
  return total * (a.n_photons + 1) / (4.0 * kPi);
}

WignerField phi_derivative(const ComplexMatrix& op, const GridPtr& grid) { return transform_impl(op, grid, true); }

WignerField phi_derivative(const SpinDensity& rho, const GridPtr& grid) {
  return transform_impl(rho.matrix(), grid, true);
}

HarmonicExpansion::HarmonicExpansion(int degree_max)
    : degree_max_(degree_max), coefficients_(static_cast<size_t>(degree_max + 1) * (degree_max + 1)) {
  if (degree_max < 0) throw std::domain_error("negative harmonic degree");
}

double HarmonicExpansion::tail_above(int degree) const {
  double worst = 0.0;
  for (int j = std::max(0, degree + 1); j <= degree_max_; ++j)
    for (int m = -j; m <= j; ++m) worst = std::max(worst, std::abs((*this)(j, m)));
  return worst;
}

HarmonicExpansion expand_field(const WignerField& field, int degree_max) {
  const SphereGrid& grid = *field.grid;
  const int total = field.n_photons + degree_max;
  if (total > 2 * grid.n_theta() - 1 || total >= grid.n_phi())
    throw std::domain_error("grid too coarse for harmonic expansion to degree " + std::to_string(degree_max));
  HarmonicExpansion out(degree_max);
  std::vector<Complex> f(2 * degree_max + 1);
  for (int i = 0; i < grid.n_theta(); ++i) {
    for (int m = -degree_max; m <= degree_max; ++m) {
      Complex acc(0.0, 0.0);
      for (int k = 0; k < grid.n_phi(); ++k)
        acc += field.values(i, k) * std::exp(Complex(0.0, -m * grid.phi_nodes()[k]));
      f[m + degree_max] = acc;
    }
    const RealMatrix p = normalized_legendre_table(degree_max, grid.theta_nodes()[i]);
    const double w = grid.weight(i);
    for (int j = 0; j <= degree_max; ++j)
      for (int m = -j; m <= j; ++m) out(j, m) += w * legendre_signed(p, j, m) * f[m + degree_max];
  }
  return out;
}

WignerField synthesize_field(const HarmonicExpansion& expansion, int n_photons, const GridPtr& grid) {
  const int jmax = expansion.degree_max();
  WignerField field{n_photons, grid, RealMatrix(grid->n_theta(), grid->n_phi())};
  std::vector<Complex> s(2 * jmax + 1);
  for (int i = 0; i < grid->n_theta(); ++i) {
    const RealMatrix p = normalized_legendre_table(jmax, grid->theta_nodes()[i]);
    for (int m = -jmax; m <= jmax; ++m) {
      Complex acc(0.0, 0.0);
      for (int j = std::abs(m); j <= jmax; ++j) acc += expansion(j, m) * legendre_signed(p, j, m);
      s[m + jmax] = acc;
    }
    for (int k = 0; k < grid->n_phi(); ++k) {
      Complex w(0.0, 0.0);
      for (int m = -jmax; m <= jmax; ++m) w += s[m + jmax] * std::exp(Complex(0.0, m * grid->phi_nodes()[k]));
      field.values(i, k) = w.real();
    }
  }
  return field;
}

}  // namespace lossyint
