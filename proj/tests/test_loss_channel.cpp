#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lossyint/loss_channel.hpp"
#include "lossyint/special_functions.hpp"
#include "test_support.hpp"

using namespace lossyint;

namespace {

std::vector<int> top_three(int n, double eta) {
  std::vector<int> idx(n + 1);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](int a, int b) { return loss_probability(n, a, eta) > loss_probability(n, b, eta); });
  idx.resize(3);
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace

TEST_SUITE("loss_channel") {
  TEST_CASE("binomial weights") {
    for (int n : {1, 7, 50}) {
      CHECK(loss_probability(n, 0, 1.0) == 1.0);
      for (int l = 1; l <= n; ++l) CHECK(loss_probability(n, l, 1.0) == 0.0);
      CHECK(loss_probability(n, n, 0.0) == 1.0);
      for (double eta : {0.1, 0.5, 0.93}) {
        double s = 0.0;
        for (int l = 0; l <= n; ++l) s += loss_probability(n, l, eta);
        CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
      }
    }
    CHECK(loss_probability(4, 2, 0.5) == doctest::Approx(6.0 / 16.0).epsilon(1e-15));
    CHECK(top_three(10, 0.9) == std::vector<int>{0, 1, 2});
    CHECK(top_three(20, 0.9) == std::vector<int>{1, 2, 3});
    CHECK_THROWS_AS(loss_probability(3, 4, 0.5), std::domain_error);
    CHECK_THROWS_AS(loss_probability(3, 1, 1.5), std::domain_error);
  }

  TEST_CASE("conditional maps on simple inputs") {
    auto gen = testing::rng(3);
    const SpinDensity rho = testing::random_density(6, gen);
    CHECK(testing::max_abs(conditional_loss_map(rho, 0).matrix() - rho.matrix()) < 1e-14);

    // N00N loses all coherence after one lost photon
    const int n = 8;
    const SpinDensity out = conditional_loss_map(SpinDensity::from_ket(noon_state(n)), 1);
    ComplexMatrix expected = ComplexMatrix::Zero(n, n);
    expected(0, 0) = expected(n - 1, n - 1) = 0.5;
    CHECK(testing::max_abs(out.matrix() - expected) < 1e-14);

    // a one-arm Fock state stays one
    for (int l = 0; l <= n; ++l) {
      const SpinDensity top = conditional_loss_map(SpinDensity::from_ket(SpinKet::basis(n, n)), l);
      CHECK(std::abs(top.matrix()(n - l, n - l) - 1.0) < 1e-14);
      CHECK(top.matrix().cwiseAbs().sum() == doctest::Approx(1.0).epsilon(1e-14));
    }
    CHECK_THROWS_AS(conditional_loss_map(rho, 7), std::domain_error);
  }

  TEST_CASE("trace preservation and positivity") {
    auto gen = testing::rng(21);
    for (int n : {1, 4, 11, 20}) {
      const SpinDensity rho = testing::random_density(n, gen);
      const SpinDensity pure = SpinDensity::from_ket(testing::random_ket(n, gen));
      for (int l = 0; l <= n; ++l) {
        const ConditionalLossMap map(n, l);
        const ComplexMatrix a = map.apply(rho.matrix());
        CHECK(std::abs(a.trace() - 1.0) < 1e-10);
        const ComplexMatrix b = map.apply(pure.matrix());
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(b);
        CHECK(es.eigenvalues().minCoeff() >= -1e-10);
      }
    }
  }

  TEST_CASE("ensembles") {
    auto gen = testing::rng(4);
    const SpinDensity rho = testing::random_density(10, gen);
    const LossEnsemble e = full_loss_ensemble(rho, 0.7);
    REQUIRE(e.branches.size() == 11);
    double p = 0.0, tr = 0.0;
    for (int l = 0; l <= 10; ++l) {
      CHECK(e.branches[l].lost == l);
      CHECK(e.branches[l].state.n_photons() == 10 - l);
      p += e.branches[l].probability;
      tr += e.branches[l].probability * e.branches[l].state.matrix().trace().real();
    }
    CHECK(p == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(tr == doctest::Approx(1.0).epsilon(1e-12));

    const LossEnsemble lossless = full_loss_ensemble(rho, 1.0);
    CHECK(lossless.branches[0].probability == 1.0);
    for (int l = 1; l <= 10; ++l) CHECK(lossless.branches[l].probability == 0.0);
    const LossEnsemble dark = full_loss_ensemble(rho, 0.0);
    CHECK(dark.branches[10].probability == 1.0);
    CHECK(dark.branches[10].state.n_photons() == 0);
  }

  TEST_CASE("phase and rotation equivariance") {
    auto gen = testing::rng(8);
    for (int n : {3, 9}) {
      const SpinDensity rho = testing::random_density(n, gen);
      for (int l = 0; l <= n; ++l) {
        const double phi = 0.71;
        const ComplexMatrix lhs = conditional_loss_map(phase_shift(rho, phi), l).matrix();
        const ComplexMatrix rhs = phase_shift(conditional_loss_map(rho, l), phi).matrix();
        CHECK(testing::max_abs(lhs - rhs) < 1e-10);
        const double al = 0.4, be = 1.9, ga = -1.1;
        const ComplexMatrix lr = conditional_loss_map(su2_rotate(rho, al, be, ga), l).matrix();
        const ComplexMatrix rr = su2_rotate(conditional_loss_map(rho, l), al, be, ga).matrix();
        CHECK(testing::max_abs(lr - rr) < 1e-10);
      }
    }
  }

  TEST_CASE("Kraus oracle agreement") {
    auto gen = testing::rng(12);
    const auto compare = [](const SpinDensity& rho, double eta) {
      const int n = rho.n_photons();
      const FockSpace space(n);
      const ComplexMatrix out = kraus_oracle(space, space.embed(rho.matrix()), eta);
      CHECK(std::abs(out.trace() - 1.0) < 1e-12);
      const LossEnsemble e = full_loss_ensemble(rho, eta);
      double worst = 0.0;
      for (const auto& b : e.branches)
        worst = std::max(worst, testing::max_abs(space.block(out, n - b.lost) - b.probability * b.state.matrix()));
      // nothing outside the photon-number blocks
      ComplexMatrix rest = out;
      for (int k = 0; k <= n; ++k)
        for (int a = 0; a <= k; ++a)
          for (int c = 0; c <= k; ++c) rest(space.index(a, k - a), space.index(c, k - c)) = 0.0;
      worst = std::max(worst, testing::max_abs(rest));
      return worst;
    };
    CHECK(compare(SpinDensity::from_ket(noon_state(4)), 0.8) < 1e-10);
    for (int n = 1; n <= 8; ++n)
      for (double eta : {0.5, 0.9}) CHECK(compare(testing::random_density(n, gen), eta) < 1e-10);
    // identity at eta = 1
    const SpinDensity rho = testing::random_density(5, gen);
    const FockSpace space(5);
    const ComplexMatrix embedded = space.embed(rho.matrix());
    CHECK(testing::max_abs(kraus_oracle(space, embedded, 1.0) - embedded) < 1e-14);
    CHECK_THROWS_AS(kraus_oracle(FockSpace(kKrausOracleMaxPhotons + 1),
                                 ComplexMatrix::Zero(FockSpace(kKrausOracleMaxPhotons + 1).dimension(),
                                                     FockSpace(kKrausOracleMaxPhotons + 1).dimension()),
                                 0.5),
                    std::domain_error);
  }

  TEST_CASE("maps carry no transmission") {
    const ConditionalLossMap map(6, 2);
    CHECK(map.n_output() == 4);
    // the same map serves every eta: lossy QFI code reuses it across transmissions
    auto gen = testing::rng(2);
    const SpinDensity rho = testing::random_density(6, gen);
    const LossEnsemble a = full_loss_ensemble(rho, 0.3), b = full_loss_ensemble(rho, 0.8);
    CHECK(testing::max_abs(a.branches[2].state.matrix() - b.branches[2].state.matrix()) == 0.0);
    CHECK(testing::max_abs(a.branches[2].state.matrix() - map.apply(rho.matrix())) < 1e-15);
  }
}
