#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "lossyint/phase_space.hpp"
#include "lossyint/special_functions.hpp"
#include "test_support.hpp"

using namespace lossyint;

namespace {

using Vec3 = Eigen::Vector3d;

Eigen::Matrix3d rot_z(double a) {
  Eigen::Matrix3d r;
  r << std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a), 0, 0, 0, 1;
  return r;
}

Eigen::Matrix3d rot_y(double a) {
  Eigen::Matrix3d r;
  r << std::cos(a), 0, std::sin(a), 0, 1, 0, -std::sin(a), 0, std::cos(a);
  return r;
}

Vec3 direction(double theta, double phi) {
  return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

}  // namespace

TEST_SUITE("phase_space") {
  TEST_CASE("grids") {
    const GridPtr g = SphereGrid::for_photons(7);
    CHECK(g->n_theta() == 16);
    CHECK(g->n_phi() == 32);
    CHECK(g->n_max() >= 7);
    CHECK(g->theta_nodes().front() > 0.0);
    CHECK(g->theta_nodes().back() < kPi);
    double s = 0.0;
    for (int i = 0; i < g->n_theta(); ++i) s += g->weight(i) * g->n_phi();
    CHECK(s == doctest::Approx(4 * kPi).epsilon(1e-13));
    CHECK_THROWS_AS(SphereGrid(4, 9).require(5), std::domain_error);
    CHECK_NOTHROW(SphereGrid(5, 9).require(4));
    CHECK_THROWS_AS(SphereGrid(0, 3), std::domain_error);
  }

  TEST_CASE("kernel matrix properties") {
    auto gen = testing::rng(17);
    CHECK(wigner_kernel_matrix(0, 0.4, 1.0).rows() == 1);
    CHECK(std::abs(wigner_kernel_matrix(0, 0.4, 1.0)(0, 0) - 1.0) < 1e-15);
    for (int n : {1, 4, 10, 21}) {
      const double th = testing::uniform_angle(gen, kPi), ph = testing::uniform_angle(gen, 2 * kPi);
      const ComplexMatrix w = wigner_kernel_matrix(n, th, ph);
      CHECK(std::abs(w.trace() - 1.0) < 1e-12);
      CHECK(testing::max_abs(w - w.adjoint()) < 1e-12);
      // covariance under rotations
      const ComplexMatrix d = wigner_rotation_matrix(n, ph, th, 0.0);
      const ComplexMatrix w0 = wigner_kernel_matrix(n, 0.0, 0.0);
      CHECK(testing::max_abs(w - d * w0 * d.adjoint()) < 1e-10);
    }
  }

  TEST_CASE("fields of simple states") {
    const int n = 9;
    const GridPtr g = SphereGrid::for_photons(n);
    const WignerField mixed = wigner_function(SpinDensity::maximally_mixed(n), g);
    CHECK((mixed.values.array() - 1.0 / (n + 1)).abs().maxCoeff() < 1e-12);
    CHECK(testing::max_abs(inverse_wigner(mixed).matrix() - ComplexMatrix::Identity(n + 1, n + 1) / (n + 1.0)) < 1e-12);

    const SpinDensity top = SpinDensity::from_ket(SpinKet::basis(n, n));
    double best = -1e9, at = -1.0;
    for (double t = 0.0; t <= kPi; t += 0.01) {
      const double v = wigner_value(top.matrix(), t, 0.3);
      if (v > best) best = v, at = t;
    }
    CHECK(at == 0.0);
  }

  TEST_CASE("normalization, traciality and round trip") {
    auto gen = testing::rng(19);
    for (int n : {1, 6, 12, 20}) {
      const GridPtr g = SphereGrid::for_photons(n);
      const SpinDensity rho = testing::random_density(n, gen);
      const WignerField w = wigner_function(rho, g);
      CHECK(w.integral() == doctest::Approx(4 * kPi / (n + 1)).epsilon(1e-12));
      const SpinDensity back = inverse_wigner(w);
      CHECK(testing::max_abs(back.matrix() - rho.matrix()) < 1e-9);
      CHECK(std::abs(back.matrix().trace() - 1.0) < 1e-12);

      const ComplexMatrix a = testing::random_hermitian(n + 1, gen), b = testing::random_hermitian(n + 1, gen);
      const double direct = (a * b).trace().real();
      CHECK(overlap_trace(wigner_transform(a, g), wigner_transform(b, g)) ==
            doctest::Approx(direct).epsilon(1e-10).scale(1.0));

      const SpinDensity pure = SpinDensity::from_ket(testing::random_ket(n, gen));
      const WignerField wp = wigner_function(pure, g);
      CHECK(overlap_trace(wp, wp) == doctest::Approx(1.0).epsilon(1e-10));
      CHECK(overlap_trace(wigner_function(SpinDensity::maximally_mixed(n), g), w) ==
            doctest::Approx(1.0 / (n + 1)).epsilon(1e-12));
    }
    const GridPtr g1 = SphereGrid::for_photons(3), g2 = SphereGrid::for_photons(4);
    CHECK_THROWS_AS(overlap_trace(wigner_function(SpinDensity::maximally_mixed(3), g1),
                                  wigner_function(SpinDensity::maximally_mixed(4), g2)),
                    std::domain_error);
  }

  TEST_CASE("grid too small is rejected") {
    const auto g = std::make_shared<const SphereGrid>(4, 9);
    CHECK_THROWS_AS(wigner_function(SpinDensity::maximally_mixed(6), g), std::domain_error);
  }

  TEST_CASE("phi derivative") {
    auto gen = testing::rng(23);
    const int n = 8;
    const GridPtr g = SphereGrid::for_photons(n);
    CHECK(phi_derivative(SpinDensity::maximally_mixed(n), g).values.cwiseAbs().maxCoeff() < 1e-14);
    const SpinDensity rho = testing::random_density(n, gen);
    const WignerField d = phi_derivative(rho, g);
    CHECK(std::abs(d.integral()) < 1e-12);
    const double h = 1e-5;
    double worst = 0.0;
    for (int i = 0; i < g->n_theta(); i += 3)
      for (int k = 0; k < g->n_phi(); k += 5) {
        const double t = g->theta_nodes()[i], p = g->phi_nodes()[k];
        const double fd = (wigner_value(rho.matrix(), t, p + h) - wigner_value(rho.matrix(), t, p - h)) / (2 * h);
        worst = std::max(worst, std::abs(fd - d.values(i, k)));
      }
    CHECK(worst < 1e-6);
    // the phase shift moves the field rigidly: W_varphi(phi) = W(phi - varphi)
    const double phi0 = 1e-5;
    const WignerField plus = wigner_function(phase_shift(rho, phi0), g);
    const WignerField minus = wigner_function(phase_shift(rho, -phi0), g);
    const RealMatrix fd = (plus.values - minus.values) / (2 * phi0);
    CHECK((fd + d.values).cwiseAbs().maxCoeff() < 1e-6);
  }

  TEST_CASE("band limit and harmonic round trip") {
    auto gen = testing::rng(29);
    for (int n : {3, 10}) {
      const auto big = std::make_shared<const SphereGrid>(2 * (n + 6), 4 * (n + 6));
      const WignerField w = wigner_function(testing::random_density(n, gen), big);
      const HarmonicExpansion h = expand_field(w, n + 5);
      CHECK(h.tail_above(n) < 1e-10);
      CHECK(std::abs(h(0, 0) - std::sqrt(4 * kPi) / (n + 1)) < 1e-12);
      const WignerField back = synthesize_field(expand_field(w, n), n, big);
      CHECK((back.values - w.values).cwiseAbs().maxCoeff() < 1e-12);
    }
    const WignerField small = wigner_function(SpinDensity::maximally_mixed(4), SphereGrid::for_photons(4));
    CHECK_THROWS_AS(expand_field(small, 40), std::domain_error);
  }

  TEST_CASE("rotation covariance of fields") {
    auto gen = testing::rng(31);
    const int n = 7;
    const SpinDensity rho = testing::random_density(n, gen);
    const double al = 0.8, be = 1.3, ga = -0.4;
    const SpinDensity rotated = su2_rotate(rho, al, be, ga);
    const Eigen::Matrix3d inv = (rot_z(al) * rot_y(be) * rot_z(ga)).transpose();
    double worst = 0.0;
    for (int s = 0; s < 50; ++s) {
      const double t = testing::uniform_angle(gen, kPi), p = testing::uniform_angle(gen, 2 * kPi);
      const Vec3 v = inv * direction(t, p);
      const double t2 = std::acos(std::clamp(v.z(), -1.0, 1.0)), p2 = std::atan2(v.y(), v.x());
      worst = std::max(worst, std::abs(wigner_value(rotated.matrix(), t, p) - wigner_value(rho.matrix(), t2, p2)));
    }
    CHECK(worst < 1e-9);
  }

  TEST_CASE("equator cuts") {
    const int n = 10;
    const std::vector<double> cut = equator_cut(SpinDensity::from_ket(noon_state(n)).matrix(), 4 * (n + 1));
    const std::vector<double> a = azimuthal_amplitudes(cut);
    const int dominant = static_cast<int>(std::max_element(a.begin() + 1, a.end()) - a.begin());
    CHECK(dominant == n);
    for (int k = 1; k < static_cast<int>(a.size()); ++k)
      if (k != n) CHECK(a[k] < 1e-12);
    const std::vector<double> flat = equator_cut(SpinDensity::maximally_mixed(n).matrix(), 17);
    for (double v : flat) CHECK(v == doctest::Approx(1.0 / (n + 1)).epsilon(1e-13));
    // agrees with pointwise evaluation
    const ComplexMatrix op = SpinDensity::from_ket(noon_state(n)).matrix();
    CHECK(cut[5] == doctest::Approx(wigner_value(op, kPi / 2, 2 * kPi * 5 / cut.size())).epsilon(1e-13));
  }
}
