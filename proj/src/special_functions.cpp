#include "lossyint/special_functions.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace lossyint {

namespace {

constexpr int kLogFactorialTableSize = 1025;

// Sum formula is used up to this j; beyond it the d-matrix comes from
// diagonalizing J_y.
constexpr int kSumFormulaMaxTwiceJ = 32;

using Extended = long double;

const std::array<Extended, kLogFactorialTableSize>& log_factorial_table() {
  static const auto table = [] {
    std::array<Extended, kLogFactorialTableSize> t{};
    Extended acc = 0.0L;
    t[0] = 0.0L;
    for (int n = 1; n < kLogFactorialTableSize; ++n) {
      acc += std::log(static_cast<Extended>(n));
      t[n] = acc;
    }
    return t;
  }();
  return table;
}

// The alternating sums below cancel heavily at large j, so their terms are
// assembled in extended precision.
Extended lfact(int n) {
  if (n < kLogFactorialTableSize) return log_factorial_table()[n];
  return std::lgamma(static_cast<Extended>(n) + 1.0L);
}

// Term of a log-space alternating sum: magnitude exp(log_mag) times sign.
struct SignedLog {
  Extended log_mag;
  int sign;
};

double sum_signed_logs(const std::vector<SignedLog>& terms, Extended log_prefactor) {
  if (terms.empty()) return 0.0;
  Extended lmax = terms.front().log_mag;
  for (const auto& t : terms) lmax = std::max(lmax, t.log_mag);
  Extended s = 0.0L;
  for (const auto& t : terms) s += t.sign * std::exp(t.log_mag - lmax);
  return static_cast<double>(s * std::exp(lmax + log_prefactor));
}

// Integer value of (sum of twice-values)/2; caller guarantees evenness.
int halve(int twice) { return twice / 2; }

double d_sum_formula(int tj, int tm, int tmp, double beta) {
  // d^j_{m,mp}(beta) = sum_k (-1)^{k+m-mp} sqrt((j+m)!(j-m)!(j+mp)!(j-mp)!)
  //     / ((j+mp-k)! k! (j-k-m)! (k+m-mp)!) c^{2j-2k+mp-m} s^{2k+m-mp}
  const int jpm = halve(tj + tm), jmm = halve(tj - tm);
  const int jpmp = halve(tj + tmp), jmmp = halve(tj - tmp);
  const int dm = halve(tm - tmp);
  const Extended half_beta = 0.5L * static_cast<Extended>(beta);
  const Extended c = std::cos(half_beta), s = std::sin(half_beta);
  const Extended lc = std::log(std::abs(c)), ls = std::log(std::abs(s));
  const int kmin = std::max(0, -dm);
  const int kmax = std::min(jpmp, jmm);
  std::vector<SignedLog> terms;
  terms.reserve(std::max(0, kmax - kmin + 1));
  for (int k = kmin; k <= kmax; ++k) {
    const int pc = tj - 2 * k - dm;  // 2j - 2k + mp - m
    const int ps = 2 * k + dm;       // 2k + m - mp
    if ((pc > 0 && c == 0.0) || (ps > 0 && s == 0.0)) continue;
    Extended lm = -(lfact(jpmp - k) + lfact(k) + lfact(jmm - k) + lfact(k + dm));
    int sign = ((k + dm) % 2 == 0) ? 1 : -1;
    if (pc > 0) {
      lm += pc * lc;
      if (c < 0 && pc % 2 == 1) sign = -sign;
    }
    if (ps > 0) {
      lm += ps * ls;
      if (s < 0 && ps % 2 == 1) sign = -sign;
    }
    terms.push_back({lm, sign});
  }
  const Extended pref = 0.5L * (lfact(jpm) + lfact(jmm) + lfact(jpmp) + lfact(jmmp));
  return sum_signed_logs(terms, pref);
}

RealMatrix d_matrix_by_diagonalization(int tj, double beta) {
  // exp(-i beta J_y) from the spectral decomposition of J_y = (J_+ - J_-)/(2i).
  // The result is real up to rounding.
  const int dim = tj + 1;
  ComplexMatrix jy = ComplexMatrix::Zero(dim, dim);
  for (int a = 0; a + 1 < dim; ++a) {
    // <m+1|J_+|m> = sqrt(j(j+1) - m(m+1)), m = -j + a
    const double m = -0.5 * tj + a;
    const double j = 0.5 * tj;
    const double cp = std::sqrt(j * (j + 1) - m * (m + 1));
    jy(a + 1, a) = Complex(0.0, -0.5 * cp);
    jy(a, a + 1) = Complex(0.0, 0.5 * cp);
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(jy);
  const auto& v = es.eigenvectors();
  ComplexVector phases(dim);
  for (int k = 0; k < dim; ++k) phases(k) = std::exp(Complex(0.0, -beta * es.eigenvalues()(k)));
  ComplexMatrix d = v * phases.asDiagonal() * v.adjoint();
  return d.real();
}

}  // namespace

std::string HalfInt::to_string() const {
  if (is_integer()) return std::to_string(twice_ / 2);
  return std::to_string(twice_) + "/2";
}

void check_projection(HalfInt j, HalfInt m) {
  if (j.twice() < 0) throw std::domain_error("negative angular momentum " + j.to_string());
  if (std::abs(m.twice()) > j.twice())
    throw std::domain_error("projection " + m.to_string() + " exceeds j = " + j.to_string());
  if ((j.twice() - m.twice()) % 2 != 0)
    throw std::domain_error("j - m not integer for j = " + j.to_string() + ", m = " + m.to_string());
}

double log_factorial(int n) {
  if (n < 0) throw std::domain_error("log_factorial of negative argument");
  return static_cast<double>(lfact(n));
}

double log_binomial(int n, int k) {
  if (k < 0 || k > n) throw std::domain_error("binomial index out of range");
  return static_cast<double>(lfact(n) - lfact(k) - lfact(n - k));
}

double clebsch_gordan(HalfInt j1, HalfInt m1, HalfInt j2, HalfInt m2, HalfInt J, HalfInt M) {
  check_projection(j1, m1);
  check_projection(j2, m2);
  check_projection(J, M);
  if (m1 + m2 != M) return 0.0;
  const int t1 = j1.twice(), t2 = j2.twice(), tJ = J.twice();
  if (tJ < std::abs(t1 - t2) || tJ > t1 + t2) return 0.0;
  if ((t1 + t2 + tJ) % 2 != 0) return 0.0;

  // Racah's closed form.
  const int a = halve(t1 + t2 - tJ);   // j1 + j2 - J
  const int b = halve(t1 - m1.twice());  // j1 - m1
  const int c = halve(t2 + m2.twice());  // j2 + m2
  const int d = halve(tJ - t2 + m1.twice());  // J - j2 + m1
  const int e = halve(tJ - t1 - m2.twice());  // J - j1 - m2
  const int kmin = std::max({0, -d, -e});
  const int kmax = std::min({a, b, c});
  std::vector<SignedLog> terms;
  terms.reserve(std::max(0, kmax - kmin + 1));
  for (int k = kmin; k <= kmax; ++k) {
    const Extended lm = -(lfact(k) + lfact(a - k) + lfact(b - k) + lfact(c - k) + lfact(d + k) + lfact(e + k));
    terms.push_back({lm, (k % 2 == 0) ? 1 : -1});
  }
  const Extended pref =
      0.5L * (std::log(static_cast<Extended>(tJ + 1)) + lfact(halve(tJ + t1 - t2)) + lfact(halve(tJ - t1 + t2)) +
              lfact(a) - lfact(halve(t1 + t2 + tJ) + 1) + lfact(halve(tJ + M.twice())) +
              lfact(halve(tJ - M.twice())) + lfact(halve(t1 - m1.twice())) + lfact(halve(t1 + m1.twice())) +
              lfact(halve(t2 - m2.twice())) + lfact(halve(t2 + m2.twice())));
  return sum_signed_logs(terms, pref);
}

double wigner_small_d(HalfInt j, HalfInt m, HalfInt mp, double beta) {
  check_projection(j, m);
  check_projection(j, mp);
  if (j.twice() <= kSumFormulaMaxTwiceJ) return d_sum_formula(j.twice(), m.twice(), mp.twice(), beta);
  const RealMatrix d = d_matrix_by_diagonalization(j.twice(), beta);
  return d(halve(j.twice() + m.twice()), halve(j.twice() + mp.twice()));
}

RealMatrix wigner_small_d_matrix(HalfInt j, double beta) {
  if (j.twice() < 0) throw std::domain_error("negative angular momentum");
  const int tj = j.twice();
  if (tj > kSumFormulaMaxTwiceJ) return d_matrix_by_diagonalization(tj, beta);
  const int dim = tj + 1;
  RealMatrix d(dim, dim);
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b) d(a, b) = d_sum_formula(tj, 2 * a - tj, 2 * b - tj, beta);
  return d;
}

RealMatrix normalized_legendre_table(int jmax, double theta) {
  if (jmax < 0) throw std::domain_error("negative degree");
  RealMatrix p = RealMatrix::Zero(jmax + 1, jmax + 1);
  const double x = std::cos(theta), s = std::sin(theta);
  double pmm = 1.0 / std::sqrt(4.0 * kPi);
  for (int m = 0; m <= jmax; ++m) {
    if (m > 0) pmm *= -std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * s;
    p(m, m) = pmm;
    if (m + 1 <= jmax) p(m + 1, m) = std::sqrt(2.0 * m + 3.0) * x * pmm;
    for (int l = m + 2; l <= jmax; ++l) {
      const double a = std::sqrt((4.0 * l * l - 1.0) / (static_cast<double>(l) * l - static_cast<double>(m) * m));
      const double b = std::sqrt(((l - 1.0) * (l - 1.0) - static_cast<double>(m) * m) /
                                 (4.0 * (l - 1.0) * (l - 1.0) - 1.0));
      p(l, m) = a * (x * p(l - 1, m) - b * p(l - 2, m));
    }
  }
  return p;
}

Complex spherical_harmonic(int j, int m, double theta, double phi) {
  if (j < 0 || std::abs(m) > j) throw std::domain_error("invalid spherical harmonic indices");
  const RealMatrix p = normalized_legendre_table(j, theta);
  const int am = std::abs(m);
  double v = p(j, am);
  if (m < 0 && am % 2 == 1) v = -v;
  return v * std::exp(Complex(0.0, m * phi));
}

ComplexMatrix wigner_rotation_matrix(int n_photons, double alpha, double beta, double gamma) {
  if (n_photons < 0) throw std::domain_error("negative photon number");
  const RealMatrix d = wigner_small_d_matrix(half(n_photons), beta);
  const int dim = n_photons + 1;
  ComplexMatrix out(dim, dim);
  for (int a = 0; a < dim; ++a) {
    const double m = a - 0.5 * n_photons;
    for (int b = 0; b < dim; ++b) {
      const double mp = b - 0.5 * n_photons;
      out(a, b) = std::exp(Complex(0.0, -alpha * m - gamma * mp)) * d(a, b);
    }
  }
  return out;
}

GaussLegendre gauss_legendre(int n) {
  if (n < 1) throw std::domain_error("Gauss-Legendre rule needs at least one node");
  GaussLegendre rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // recompute derivative at the converged node
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

}  // namespace lossyint
