#include <doctest.h>

#include <clocale>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "lossyint/serialization.hpp"
#include "test_support.hpp"

using namespace lossyint;

TEST_SUITE("serialization") {
  TEST_CASE("number formatting") {
    CHECK(format_number(0.1) == "0.10000000000000001");
    CHECK(format_number(1.0) == "1");
    for (double v : {-2.5e-300, 1e21, 123456789.125, 5e-324}) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.17g", v);
      CHECK(format_number(v) == buf);
    }
    CHECK(format_number(std::numeric_limits<double>::quiet_NaN()) == "nan");
    CHECK(format_number(-std::numeric_limits<double>::infinity()) == "-inf");
    for (double v : {1.0 / 3.0, 12345.678901234567, 6.02214076e23}) CHECK(std::stod(format_number(v)) == v);
    // independent of the C locale
    const char* old = std::setlocale(LC_NUMERIC, nullptr);
    const std::string saved = old ? old : "C";
    if (std::setlocale(LC_NUMERIC, "de_DE.UTF-8")) {
      CHECK(format_number(0.5) == "0.5");
      std::setlocale(LC_NUMERIC, saved.c_str());
    }
  }

  TEST_CASE("state round trips") {
    auto gen = testing::rng(5);
    const SpinKet psi = testing::random_ket(6, gen);
    const nlohmann::json kj = nlohmann::json::parse(to_json(psi).dump());
    CHECK(kj["n_photons"] == 6);
    CHECK(ket_from_json(kj).amplitudes() == psi.amplitudes());

    const SpinDensity rho = testing::random_density(4, gen);
    const nlohmann::json dj = nlohmann::json::parse(to_json(rho).dump());
    CHECK(dj["real"].size() == 25);
    CHECK(density_from_json(dj).matrix() == rho.matrix());
    // row-major layout
    CHECK(dj["real"][1].get<double>() == rho.matrix()(0, 1).real());

    nlohmann::json bad = kj;
    bad["real"].push_back(0.0);
    CHECK_THROWS_AS(ket_from_json(bad), std::invalid_argument);
    CHECK_THROWS_AS(ket_from_json(nlohmann::json::object()), std::invalid_argument);
    nlohmann::json unnormalized = kj;
    unnormalized["real"][0] = 5.0;
    CHECK_THROWS_AS(ket_from_json(unnormalized), std::invalid_argument);
  }

  TEST_CASE("documents") {
    const LossEnsemble e = full_loss_ensemble(SpinDensity::from_ket(noon_state(3)), 0.6);
    const auto ej = to_json(e);
    REQUIRE(ej["branches"].size() == 4);
    for (int l = 0; l <= 3; ++l) CHECK(ej["branches"][l]["lost"] == l);

    PrecisionRecord r = make_precision_record(noon_state(3), 1.0);
    const auto rj = to_json(r);
    CHECK(rj["bound_asymptotic"].is_null());
    CHECK(rj["fisher"].get<double>() == doctest::Approx(9.0));

    const WignerField w = wigner_function(SpinDensity::maximally_mixed(2), SphereGrid::for_photons(2));
    const auto wj = to_json(w);
    CHECK(wj["grid"]["n_theta"] == 6);
    CHECK(wj["values"].size() == 6 * 12);
    CHECK(wj["integral"].get<double>() == doctest::Approx(4 * kPi / 3));
  }

  TEST_CASE("csv output") {
    Metadata meta;
    meta.set("case", "x,y");
    meta.set("ratio", 0.25);
    std::ostringstream out;
    write_csv(out, meta, {"a", "b", "c"}, {{1.5, 2LL, std::string("p,q")}});
    const std::string text = out.str();
    CHECK(text.rfind("# version: " + library_version() + "\n", 0) == 0);
    CHECK(text.find("# ratio: 0.25\n") != std::string::npos);
    CHECK(text.find("a,b,c\n1.5,2,\"p,q\"\n") != std::string::npos);
    CHECK_THROWS_AS(write_csv(out, meta, {"a"}, {{1.0, 2.0}}), std::invalid_argument);

    std::ostringstream w;
    write_wigner_csv(w, wigner_function(SpinDensity::maximally_mixed(1), SphereGrid::for_photons(1)), Metadata{});
    CHECK(w.str().find("theta,phi,weight,value\n") != std::string::npos);
    CHECK(w.str().find("# grid_theta: 4\n") != std::string::npos);

    const double thetas[] = {0.0, 0.3};
    const std::vector<KernelProfile> ps{exact_kernel_profile(4, 1, thetas)};
    std::ostringstream k;
    write_kernel_csv(k, ps, Metadata{});
    CHECK(k.str().find("theta,value,kind,N,L,rescale_factor\n0,") != std::string::npos);
    CHECK(k.str().find(",exact,4,1,1\n") != std::string::npos);

    const std::vector<PrecisionRecord> recs{make_precision_record(noon_state(2), 0.5)};
    std::ostringstream p;
    write_precision_csv(p, recs, Metadata{});
    CHECK(p.str().find("N,eta,fisher,delta_phi,asymptotic,wigner_bound,converged\n2,0.5,") != std::string::npos);
  }
}
