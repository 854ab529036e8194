#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "lossyint/loss_channel.hpp"
#include "lossyint/loss_kernel.hpp"
#include "lossyint/special_functions.hpp"
#include "test_support.hpp"

using namespace lossyint;

TEST_SUITE("loss_kernel") {
  TEST_CASE("exact kernel is zonal and normalized") {
    for (double t : {0.1, 0.7, 1.9, 3.0})
      CHECK(exact_kernel_value(10, 3, t, 0.0) == doctest::Approx(exact_kernel_value(10, 3, t, 1.3)).epsilon(1e-10));
    CHECK(exact_kernel_integral(10, 4) == doctest::Approx(11.0 / 7.0).epsilon(1e-8));
    for (int n = 0; n <= 12; ++n)
      for (int l = 0; l <= n; ++l)
        CHECK(exact_kernel_integral(n, l) == doctest::Approx((n + 1.0) / (n - l + 1.0)).epsilon(1e-8));
    const double thetas[] = {0.0, 0.5, 1.0};
    const KernelProfile p = exact_kernel_profile(10, 3, thetas);
    CHECK(p.kind == KernelKind::exact);
    CHECK(p.rescale_factor == 1.0);
    CHECK(p.values[1] == doctest::Approx(exact_kernel_value(10, 3, 0.5, 0.2)).epsilon(1e-12));
    CHECK_THROWS_AS(exact_kernel_profile(5, 6, thetas), std::domain_error);
  }

  TEST_CASE("lossless kernel is the reproducing kernel") {
    // (N+1)/(4 pi) Tr[w(Omega) w(0)] from the kernel matrices
    const int n = 6;
    for (double t : {0.0, 0.4, 2.0}) {
      const ComplexMatrix a = wigner_kernel_matrix(n, t, 0.0), b = wigner_kernel_matrix(n, 0.0, 0.0);
      CHECK(exact_kernel_value(n, 0, t, 0.0) == doctest::Approx((n + 1) / (4 * kPi) * (a * b).trace().real()).epsilon(1e-12));
    }
  }

  TEST_CASE("order-0 term") {
    for (int n : {1, 6, 20, 50})
      for (double t : {0.05, 0.6, 1.4, 2.9}) {
        const double expected = std::sin((n + 1) * t) / std::sin(t);
        CHECK(order0_kernel(n, 0, t) == doctest::Approx(expected).epsilon(1e-10).scale(1.0));
      }
    CHECK(order0_kernel(9, 0, 0.0) == doctest::Approx(10.0).epsilon(1e-13));
    // theta = 0 value (N+1)/(2K+1)
    CHECK(order0_kernel(30, 7, 0.0) == doctest::Approx(31.0 / 15.0).epsilon(1e-12));
    CHECK_THROWS_AS(order0_kernel(10, 6, 0.3), std::domain_error);
    CHECK_THROWS_AS(order0_kernel(10, -1, 0.3), std::domain_error);
  }

  TEST_CASE("order-0 Gaussian limit at N = 50") {
    const int n = 50;
    for (int two_k : {24, 26}) {
      const double k = 0.5 * two_k;
      const double sigma = std::sqrt(4 * k / (2.0 * n * (n - two_k)));
      double worst = 0.0;
      for (double t = 0.0; t <= 2 * sigma + 1e-12; t += sigma / 50) {
        const double gauss = (n + 1.0) / two_k * std::exp(-n * (n - two_k) * std::sin(t) * std::sin(t) / (4 * k));
        worst = std::max(worst, std::abs(order0_kernel(n, two_k / 2, t) / gauss - 1.0));
      }
      MESSAGE("2K = " << two_k << ": largest relative deviation within 2 sigma " << worst);
      CHECK(worst <= 0.05);
    }
  }

  TEST_CASE("asymptotic kernel") {
    const std::vector<double> thetas{0.0, 0.1, 0.2, 0.4};
    const KernelProfile p = asymptotic_kernel_profile(40, 17, thetas);
    CHECK(p.kind == KernelKind::asymptotic);
    CHECK(p.rescale_factor > 0.5);
    CHECK(p.rescale_factor < 2.0);
    for (double v : p.values) CHECK(std::isfinite(v));
    // rescaled integral by a fine theta quadrature
    const GaussLegendre r = gauss_legendre(120);
    std::vector<double> nodes;
    for (double x : r.nodes) nodes.push_back(std::acos(x));
    const KernelProfile q = asymptotic_kernel_profile(40, 17, nodes);
    double integral = 0.0;
    for (size_t i = 0; i < nodes.size(); ++i) integral += 2 * kPi * r.weights[i] * q.values[i];
    CHECK(integral == doctest::Approx(41.0 / 24.0).epsilon(1e-10));
    // the bracket rule for odd L agrees with the next lower even L shape
    const KernelProfile odd = asymptotic_kernel_profile(40, 17, thetas, OddLossRule::lower_bracket);
    const KernelProfile even = asymptotic_kernel_profile(40, 16, thetas);
    for (size_t i = 0; i < thetas.size(); ++i)
      CHECK(odd.values[i] / odd.values[0] == doctest::Approx(even.values[i] / even.values[0]).epsilon(1e-12));
  }

  TEST_CASE("kernel widths against the exact kernel") {
    const KernelWidths a = compare_kernel_widths(50, 25);
    CHECK(std::abs(a.fwhm_asymptotic / a.fwhm_exact - 1.0) <= 0.05);
    const KernelWidths b = compare_kernel_widths(30, 15);
    CHECK(std::abs(b.fwhm_asymptotic / b.fwhm_exact - 1.0) <= 0.08);
    const double target = std::sqrt(0.5 / (0.5 * 50));
    CHECK(std::abs(a.sigma_exact / target - 1.0) <= 0.10);
    CHECK(std::abs(a.sigma_asymptotic / target - 1.0) <= 0.10);
  }

  TEST_CASE("width helpers on known profiles") {
    const double s = 0.13;
    const auto g = [&](double t) { return std::exp(-t * t / (2 * s * s)); };
    CHECK(full_width_half_max(g) == doctest::Approx(2 * std::sqrt(2 * std::log(2.0)) * s).epsilon(1e-9));
    const auto h = [&](double t) { return 3.0 * std::exp(-std::sin(t) * std::sin(t) / (2 * s * s)); };
    CHECK(fitted_gaussian_width(h) == doctest::Approx(s).epsilon(1e-9));
    CHECK_THROWS_AS(full_width_half_max([](double) { return 1.0; }), std::domain_error);
    CHECK_THROWS_AS(full_width_half_max([](double) { return -1.0; }), std::domain_error);
  }

  TEST_CASE("convolution matches the operator path") {
    auto gen = testing::rng(71);
    const int n = 10;
    const SpinDensity rho = testing::random_density(n, gen);
    const WignerField w = wigner_function(rho, SphereGrid::for_photons(n));
    CHECK((convolve_loss(w, 0).values - w.values).cwiseAbs().maxCoeff() < 1e-9);
    for (int l = 1; l <= 3; ++l) {
      const WignerField c = convolve_loss(w, l);
      const WignerField o = wigner_function(conditional_loss_map(rho, l), c.grid);
      CHECK(c.n_photons == n - l);
      CHECK((c.values - o.values).cwiseAbs().maxCoeff() < 1e-8);
    }
    // multipliers: lambda_0 carries the normalization
    CHECK(kernel_legendre_multipliers(10, 4)(0) == doctest::Approx(11.0 / 7.0).epsilon(1e-10));
  }

  TEST_CASE("convolution output is band limited and equivariant") {
    auto gen = testing::rng(73);
    const int n = 9, l = 3;
    const SpinDensity rho = testing::random_density(n, gen);
    const auto big = std::make_shared<const SphereGrid>(2 * (n + 4), 4 * (n + 4));
    const WignerField w = wigner_function(rho, big);
    const WignerField c = convolve_loss(w, l, big);
    CHECK(expand_field(c, n + 2).tail_above(n - l) <= 1e-9);

    const double al = 0.5, be = 2.1, ga = 1.0;
    const WignerField cr = convolve_loss(wigner_function(su2_rotate(rho, al, be, ga), big), l, big);
    const WignerField rc = wigner_function(su2_rotate(inverse_wigner(c), al, be, ga), big);
    CHECK((cr.values - rc.values).cwiseAbs().maxCoeff() < 1e-8);
  }

  TEST_CASE("one lost photon erases the N00N fringe") {
    const int n = 12;
    const GridPtr g = SphereGrid::for_photons(n);
    const WignerField w = wigner_function(SpinDensity::from_ket(noon_state(n)), g);
    const WignerField c = convolve_loss(w, 1);
    const std::vector<double> a = azimuthal_amplitudes(equator_cut(inverse_wigner(c).matrix(), 4 * n));
    for (size_t k = 1; k < a.size(); ++k) CHECK(a[k] <= 1e-10);
    const std::vector<double> before = azimuthal_amplitudes(equator_cut(inverse_wigner(w).matrix(), 4 * n));
    CHECK(before[n] > 1e-2);
  }
}
