#include "lossyint/loss_kernel.hpp"

#include <cmath>
#include <stdexcept>

#include "lossyint/loss_channel.hpp"
#include "lossyint/special_functions.hpp"

namespace lossyint {

namespace {

void check_loss(int n_input, int n_lost) {
  if (n_input < 0) throw std::domain_error("negative photon number");
  if (n_lost < 0 || n_lost > n_input) throw std::domain_error("lost photon count out of range");
}

double evaluate_exact(const RealVector& pole, int n_input, double theta) {
  const int kept = static_cast<int>(pole.size()) - 1;
  const RealMatrix w = wigner_kernel(kept).at_theta(theta);
  return (n_input + 1) / (4.0 * kPi) * w.diagonal().dot(pole);
}

// Integral over the sphere of a zonal profile that is a polynomial of degree
// <= degree in cos(theta).
double zonal_integral(const std::function<double(double)>& profile, int degree) {
  const GaussLegendre rule = gauss_legendre(degree / 2 + 2);
  double s = 0.0;
  for (size_t i = 0; i < rule.nodes.size(); ++i) s += rule.weights[i] * profile(std::acos(rule.nodes[i]));
  return 2.0 * kPi * s;
}

// Order-0 integral with 2K = two_k, which may be odd: the integrand stays
// well defined and real for half-integer K.
double order0_value(int n_input, int two_k, double theta) {
  const double half_lost = 0.5 * two_k;
  const int power = n_input - two_k;
  const GaussLegendre rule = gauss_legendre(std::max(64, n_input));
  const double c = std::cos(theta), s = std::sin(theta);
  Complex acc(0.0, 0.0);
  double scale = 0.0;
  for (size_t i = 0; i < rule.nodes.size(); ++i) {
    const double x = rule.nodes[i];
    const Complex term = rule.weights[i] * std::pow(1.0 - x * x, half_lost) *
                         std::pow(Complex(c, x * s), power);
    acc += term;
    scale += std::abs(term);
  }
  if (std::abs(acc.imag()) > 1e-10 * std::max(1.0, scale))
    throw std::runtime_error("order-0 kernel quadrature left an imaginary part");
  const double pref = (n_input + 1) / (2.0 * std::sqrt(kPi)) *
                      std::exp(std::lgamma(half_lost + 0.5) - std::lgamma(half_lost + 1.0));
  return pref * acc.real();
}

// Unscaled combined large-N form.
double asymptotic_value(int n_input, int two_k, double theta) {
  const double n = n_input;
  return (n + 1.0) / (4.0 * kPi) * (1.0 + (n - two_k) / n * std::cos(theta) + two_k / n) *
         order0_value(n_input, two_k, theta);
}

int even_part(int n_lost, OddLossRule rule) {
  return rule == OddLossRule::lower_bracket ? n_lost - n_lost % 2 : n_lost;
}

}  // namespace

std::string to_string(KernelKind kind) {
  switch (kind) {
    case KernelKind::exact:
      return "exact";
    case KernelKind::asymptotic:
      return "asymptotic";
    case KernelKind::order0:
      return "order0";
  }
  return "unknown";
}

RealVector lost_pole_kernel(int n_input, int n_lost) {
  check_loss(n_input, n_lost);
  const RealMatrix pole = wigner_kernel(n_input).at_theta(0.0);
  const ConditionalLossMap map(n_input, n_lost);
  // w_N at the pole is diagonal and the map keeps diagonals diagonal.
  const RealMatrix diag = pole.diagonal().asDiagonal();
  return map.apply(diag).diagonal();
}

double exact_kernel_value(int n_input, int n_lost, double theta, double phi) {
  const RealVector pole = lost_pole_kernel(n_input, n_lost);
  const ComplexMatrix w = wigner_kernel_matrix(n_input - n_lost, theta, phi);
  const Complex tr = (w * pole.cast<Complex>().asDiagonal()).trace();
  return (n_input + 1) / (4.0 * kPi) * tr.real();
}

KernelProfile exact_kernel_profile(int n_input, int n_lost, std::span<const double> thetas) {
  const RealVector pole = lost_pole_kernel(n_input, n_lost);
  KernelProfile out;
  out.n_input = n_input;
  out.n_lost = n_lost;
  out.kind = KernelKind::exact;
  out.thetas.assign(thetas.begin(), thetas.end());
  out.values.reserve(thetas.size());
  for (double t : thetas) out.values.push_back(evaluate_exact(pole, n_input, t));
  return out;
}

double exact_kernel_integral(int n_input, int n_lost) {
  const RealVector pole = lost_pole_kernel(n_input, n_lost);
  return zonal_integral([&](double t) { return evaluate_exact(pole, n_input, t); }, n_input - n_lost);
}

double order0_kernel(int n_input, int half_lost, double theta) {
  if (half_lost < 0 || 2 * half_lost > n_input) throw std::domain_error("order-0 kernel needs 0 <= 2K <= N");
  return order0_value(n_input, 2 * half_lost, theta);
}

KernelProfile asymptotic_kernel_profile(int n_input, int n_lost, std::span<const double> thetas, OddLossRule rule) {
  check_loss(n_input, n_lost);
  if (n_input == 0) throw std::domain_error("asymptotic kernel needs N >= 1");
  const int two_k = even_part(n_lost, rule);
  const auto raw = [&](double t) { return asymptotic_value(n_input, two_k, t); };
  const double target = (n_input + 1.0) / (n_input - n_lost + 1.0);
  const double integral = zonal_integral(raw, n_input - two_k + 1);
  KernelProfile out;
  out.n_input = n_input;
  out.n_lost = n_lost;
  out.kind = KernelKind::asymptotic;
  out.rescale_factor = target / integral;
  out.thetas.assign(thetas.begin(), thetas.end());
  out.values.reserve(thetas.size());
  for (double t : thetas) out.values.push_back(out.rescale_factor * raw(t));
  return out;
}

RealVector kernel_legendre_multipliers(int n_input, int n_lost) {
  const RealVector pole = lost_pole_kernel(n_input, n_lost);
  const GaussLegendre rule = gauss_legendre(n_input + 2);
  RealVector lambda = RealVector::Zero(n_input + 1);
  for (size_t i = 0; i < rule.nodes.size(); ++i) {
    const double theta = std::acos(rule.nodes[i]);
    const double k = evaluate_exact(pole, n_input, theta);
    const RealMatrix p = normalized_legendre_table(n_input, theta);
    for (int j = 0; j <= n_input; ++j) {
      // P_j = sqrt(4 pi/(2j+1)) * normalized P_j^0
      lambda(j) += rule.weights[i] * k * std::sqrt(4.0 * kPi / (2.0 * j + 1.0)) * p(j, 0);
    }
  }
  return 2.0 * kPi * lambda;
}

WignerField convolve_loss(const WignerField& field, int n_lost, GridPtr output_grid) {
  const int n = field.n_photons;
  check_loss(n, n_lost);
  if (!output_grid) output_grid = SphereGrid::for_photons(n - n_lost);
  HarmonicExpansion coeffs = expand_field(field, n);
  const RealVector lambda = kernel_legendre_multipliers(n, n_lost);
  for (int j = 0; j <= n; ++j)
    for (int m = -j; m <= j; ++m) coeffs(j, m) *= lambda(j);
  return synthesize_field(coeffs, n - n_lost, output_grid);
}

double full_width_half_max(const std::function<double(double)>& profile, double theta_max) {
  constexpr int kScanSteps = 4000;
  const double peak = profile(0.0);
  if (!(peak > 0.0)) throw std::domain_error("profile must be positive at theta = 0");
  const double half_peak = 0.5 * peak;
  const double step = theta_max / kScanSteps;
  for (int i = 1; i <= kScanSteps; ++i) {
    double hi = i * step;
    if (profile(hi) > half_peak) continue;
    double lo = hi - step;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      (profile(mid) > half_peak ? lo : hi) = mid;
    }
    return lo + hi;  // twice the half-width
  }
  throw std::domain_error("profile never drops to half maximum");
}

double fitted_gaussian_width(const std::function<double(double)>& profile, double floor_fraction) {
  constexpr int kSamples = 400;
  if (!(floor_fraction > 0.0 && floor_fraction < 1.0)) throw std::domain_error("floor fraction must lie in (0, 1)");
  const double peak = profile(0.0);
  if (!(peak > 0.0)) throw std::domain_error("profile must be positive at theta = 0");
  // edge of the fitted region
  const double step = kPi / 2.0 / 4000.0;
  double edge = 0.0;
  while (edge + step <= kPi / 2.0 && profile(edge + step) > floor_fraction * peak) edge += step;
  if (edge == 0.0) throw std::domain_error("profile drops below the fit floor immediately");
  // ln(f/f0) = -x / (2 sigma^2) with x = sin^2(theta), fitted through the origin
  double sxy = 0.0, sxx = 0.0;
  for (int i = 1; i <= kSamples; ++i) {
    const double t = edge * i / kSamples;
    const double x = std::sin(t) * std::sin(t);
    const double y = std::log(profile(t) / peak);
    sxy += x * y;
    sxx += x * x;
  }
  const double slope = sxy / sxx;
  if (!(slope < 0.0)) throw std::domain_error("profile does not decay");
  return std::sqrt(-0.5 / slope);
}

KernelWidths compare_kernel_widths(int n_input, int n_lost, OddLossRule rule) {
  const RealVector pole = lost_pole_kernel(n_input, n_lost);
  const auto exact = [&](double t) { return evaluate_exact(pole, n_input, t); };
  // The rescale factor does not change widths; compute it once.
  const double zero = 0.0;
  const double scale = asymptotic_kernel_profile(n_input, n_lost, std::span<const double>(&zero, 1), rule).rescale_factor;
  const int two_k = even_part(n_lost, rule);
  const auto asymptotic = [&](double t) { return scale * asymptotic_value(n_input, two_k, t); };
  KernelWidths w;
  w.fwhm_exact = full_width_half_max(exact);
  w.fwhm_asymptotic = full_width_half_max(asymptotic);
  w.sigma_exact = fitted_gaussian_width(exact);
  w.sigma_asymptotic = fitted_gaussian_width(asymptotic);
  return w;
}

}  // namespace lossyint
