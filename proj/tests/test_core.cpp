// Cascade descriptions: Doppler composition, relay-gain resolution,
// effective powers, threshold grids, and unit conversions.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "nrayleigh/core.hpp"
#include "test_helpers.hpp"

using namespace nray;
using testutil::rel_err;

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
}

TEST_CASE("doppler kinds, effective frequency, derivative variance") {
    const DopplerSpec f2m = DopplerSpec::fixed_to_mobile(7.0);
    CHECK(f2m.kind == DopplerSpec::Kind::FixedToMobile);
    CHECK(effective_doppler(f2m) == doctest::Approx(7.0).epsilon(1e-15));
    CHECK(max_doppler(f2m) == doctest::Approx(7.0).epsilon(1e-15));

    const DopplerSpec m2m = DopplerSpec::mobile_to_mobile(3.0, 4.0);
    CHECK(m2m.kind == DopplerSpec::Kind::MobileToMobile);
    // effective frequency combines both terminal Dopplers in quadrature,
    // while the spectral support extends to their sum
    CHECK(effective_doppler(m2m) == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(max_doppler(m2m) == doctest::Approx(7.0).epsilon(1e-15));

    CHECK(rel_err(derivative_variance(2.0, 3.0), kPi * kPi * 18.0) < 1e-15);
    CHECK(derivative_variance(1.0, 0.0) == 0.0);

    CHECK_THROWS_AS(DopplerSpec::fixed_to_mobile(-1.0).validate(), std::invalid_argument);
    CHECK_THROWS_AS(DopplerSpec::mobile_to_mobile(1.0, -2.0).validate(), std::invalid_argument);
    CHECK_NOTHROW(DopplerSpec::fixed_to_mobile(0.0).validate());  // static hop is describable
}

TEST_CASE("hop mean SNR from mean power and noise") {
    HopSpec h;
    h.omega_hat = 2.0;
    h.noise_variance = 0.5;
    CHECK(rel_err(h.mean_snr(), 4.0) < 1e-15);

    HopSpec bare;
    CHECK_THROWS_AS(bare.mean_snr(), std::invalid_argument);
}

TEST_CASE("semi-blind relay gain pins") {
    // G^2 = (1/omega_hat) e^{1/snr} E1(1/snr), frozen reference values
    CHECK(rel_err(semi_blind_gain_sq(1.0, 1.0), 0.59634736232319407) < 1e-12);
    CHECK(rel_err(semi_blind_gain_sq(std::pow(10.0, 0.5), 1.0), 1.1894226682931217) < 1e-12);
    // scales inversely with the feeding hop's mean power
    CHECK(rel_err(semi_blind_gain_sq(1.0, 4.0), 0.59634736232319407 / 4.0) < 1e-14);
    // e^{1/s} E1(1/s) ~ ln(s) - gamma for large snr s: the gain keeps
    // growing, slowly, as the feeding hop improves
    CHECK(semi_blind_gain_sq(100.0, 1.0) > semi_blind_gain_sq(10.0, 1.0));
    CHECK(semi_blind_gain_sq(10.0, 1.0) > semi_blind_gain_sq(1.0, 1.0));

    CHECK_THROWS_AS(semi_blind_gain_sq(0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(semi_blind_gain_sq(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("relay gain resolution along the cascade") {
    CascadeSpec c;
    for (int i = 0; i < 3; ++i) {
        HopSpec h;
        h.omega_hat = (i == 0) ? 2.0 : (i == 1 ? 1.0 : 0.5);
        h.doppler = DopplerSpec::fixed_to_mobile(1.0);
        c.hops.push_back(h);
    }
    c.hops[0].noise_variance = 0.25;  // snr 8
    c.hops[1].noise_variance = 0.5;   // snr 2
    c.gains = {RelayGainSpec::unity(), RelayGainSpec::explicit_gain(2.0),
               RelayGainSpec::semi_blind()};
    c.validate();

    CHECK(resolved_gain(c, 0) == 1.0);
    CHECK(resolved_gain(c, 1) == 2.0);
    CHECK(rel_err(resolved_gain(c, 2), std::sqrt(semi_blind_gain_sq(2.0, 1.0))) < 1e-14);

    const std::vector<double> p = effective_powers(c);
    REQUIRE(p.size() == 3);
    CHECK(rel_err(p[0], 2.0) < 1e-15);
    CHECK(rel_err(p[1], 1.0 * 4.0) < 1e-15);
    CHECK(rel_err(p[2], 0.5 * semi_blind_gain_sq(2.0, 1.0)) < 1e-14);
    CHECK(rel_err(phi(c), p[0] * p[1] * p[2]) < 1e-14);

    SUBCASE("fixed-C gain uses the feeding hop's noise power") {
        c.gains[1] = RelayGainSpec::fixed_c(3.0);
        CHECK(rel_err(resolved_gain(c, 1), 1.0 / std::sqrt(3.0 * 0.25)) < 1e-14);
    }
    SUBCASE("fixed-C without feeding noise power is rejected") {
        c.hops[0].noise_variance.reset();
        c.gains[1] = RelayGainSpec::fixed_c(3.0);
        CHECK_THROWS_AS(resolved_gain(c, 1), std::invalid_argument);
    }
    SUBCASE("semi-blind without feeding noise power is rejected") {
        c.hops[1].noise_variance.reset();
        CHECK_THROWS_AS(resolved_gain(c, 2), std::invalid_argument);
    }
    SUBCASE("first gain must be unity") {
        c.gains[0] = RelayGainSpec::explicit_gain(2.0);
        CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    }
}

TEST_CASE("node-mobility composition into per-hop Doppler") {
    const CascadeSpec c = testutil::node_cascade({1.0, 1.0}, {3.0, 4.0, 0.0});
    c.validate();

    const DopplerSpec h0 = hop_doppler(c, 0);
    CHECK(h0.kind == DopplerSpec::Kind::MobileToMobile);
    CHECK(effective_doppler(h0) == doctest::Approx(5.0).epsilon(1e-15));

    const DopplerSpec h1 = hop_doppler(c, 1);
    CHECK(h1.kind == DopplerSpec::Kind::FixedToMobile);
    CHECK(effective_doppler(h1) == doctest::Approx(4.0).epsilon(1e-15));

    // interior nodes are shared by two hops, so their Doppler counts twice
    CHECK(rel_err(doppler_sum_sq({3.0, 4.0, 0.0}), 9.0 + 2.0 * 16.0) < 1e-15);
    CHECK(rel_err(doppler_sum_sq(c), 25.0 + 16.0) < 1e-15);
    CHECK(rel_err(doppler_sum_sq(c), doppler_sum_sq({3.0, 4.0, 0.0})) < 1e-15);

    const std::vector<double> effs = effective_dopplers(c);
    REQUIRE(effs.size() == 2);
    CHECK(rel_err(effs[0], 5.0) < 1e-15);
    CHECK(rel_err(effs[1], 4.0) < 1e-15);

    SUBCASE("node list must have one entry per node") {
        CascadeSpec bad = c;
        bad.node_dopplers = {3.0, 4.0};
        CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    }
    SUBCASE("node mode excludes per-hop Doppler") {
        CascadeSpec bad = c;
        bad.hops[0].doppler = DopplerSpec::fixed_to_mobile(1.0);
        CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    }
    SUBCASE("negative node Doppler is rejected") {
        CascadeSpec bad = c;
        bad.node_dopplers = {3.0, -4.0, 0.0};
        CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    }
    SUBCASE("per-hop mode requires Doppler on every hop") {
        CascadeSpec bad = c;
        bad.node_dopplers.clear();
        bad.hops[0].doppler = DopplerSpec::fixed_to_mobile(1.0);
        CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    }
}

TEST_CASE("cascade validation guards") {
    CascadeSpec empty;
    CHECK_THROWS_AS(empty.validate(), std::invalid_argument);

    CascadeSpec c = testutil::unit_cascade({1.0, 1.0});
    CHECK_NOTHROW(c.validate());

    SUBCASE("gain list must match hop count") {
        c.gains.pop_back();
        CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    }
    SUBCASE("mean powers must be positive") {
        c.hops[1].omega_hat = 0.0;
        CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    }
    SUBCASE("noise power, when present, must be positive") {
        c.hops[0].noise_variance = 0.0;
        CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    }
    SUBCASE("value-carrying gain modes need positive values") {
        // the factories reject bad constants outright ...
        CHECK_THROWS_AS(RelayGainSpec::explicit_gain(0.0), std::invalid_argument);
        CHECK_THROWS_AS(RelayGainSpec::fixed_c(-1.0), std::invalid_argument);
        // ... and validate() catches hand-built specs that bypass them
        RelayGainSpec bad;
        bad.mode = RelayGainSpec::Mode::Explicit;
        bad.value = 0.0;
        c.gains[1] = bad;
        CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    }
}

TEST_CASE("semi-blind chain power product pins") {
    // equal per-hop SNR chains collapse to known power products
    const double s5 = std::pow(10.0, 0.5);
    const CascadeSpec five_db = testutil::semi_blind_chain({s5, s5, s5, s5, s5}, 1.0);
    five_db.validate();
    CHECK(rel_err(phi(five_db), 2.001450458215) < 1e-9);

    const CascadeSpec twenty_db =
        testutil::semi_blind_chain({100.0, 100.0, 100.0, 100.0, 100.0}, 1.0);
    CHECK(rel_err(phi(twenty_db), 276.698459179995) < 1e-9);

    const CascadeSpec mixed = testutil::semi_blind_chain(
        {1.0, 10.0, std::pow(10.0, 1.5), std::pow(10.0, 1.5), 100.0}, 1.0);
    CHECK(rel_err(phi(mixed), 10.823412343745) < 1e-9);

    CHECK(rel_err(phi(std::vector<double>{2.0, 3.0, 4.0}), 24.0) < 1e-15);
    CHECK_THROWS_AS(phi(std::vector<double>{}), std::invalid_argument);
    CHECK_THROWS_AS(phi(std::vector<double>{1.0, 0.0}), std::invalid_argument);
}

TEST_CASE("threshold grids and dB conversions") {
    const ThresholdGrid g = ThresholdGrid::from_db_range(-10.0, 0.0, 5.0, 4.0);
    REQUIRE(g.values.size() == 3);
    CHECK(g.normalization == 4.0);
    CHECK(rel_err(g.values[0], 2.0 * std::pow(10.0, -0.5)) < 1e-12);
    CHECK(rel_err(g.values[1], 2.0 * std::pow(10.0, -0.25)) < 1e-12);
    CHECK(rel_err(g.values[2], 2.0) < 1e-12);

    const ThresholdGrid standard = ThresholdGrid::from_db_range(-30.0, 10.0, 0.5);
    CHECK(standard.values.size() == 81);
    CHECK(standard.normalization == 1.0);

    CHECK(rel_err(threshold_db_to_amplitude(0.0, 4.0), 2.0) < 1e-15);
    CHECK(rel_err(threshold_db_to_amplitude(-20.0, 1.0), 0.1) < 1e-12);
    for (double db : {-17.0, -3.5, 0.0, 8.25})
        CHECK(rel_err(amplitude_to_threshold_db(threshold_db_to_amplitude(db, 2.5), 2.5), db) <
              1e-12);
    CHECK(rel_err(snr_db_to_linear(5.0), std::pow(10.0, 0.5)) < 1e-15);
    CHECK(snr_db_to_linear(0.0) == 1.0);

    CHECK_THROWS_AS(ThresholdGrid::from_db_range(0.0, -10.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(ThresholdGrid::from_db_range(-10.0, 0.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(ThresholdGrid::from_db_range(-10.0, 0.0, 0.5, -1.0), std::invalid_argument);

    ThresholdGrid bad;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);  // empty
    bad.values = {1.0, 0.5};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);  // not increasing
    bad.values = {0.0, 0.5};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);  // nonpositive threshold
}

TEST_CASE("method names are the CLI vocabulary") {
    CHECK(std::string(method_name(Method::Exact)) == "exact");
    CHECK(std::string(method_name(Method::Laplace)) == "laplace");
    CHECK(std::string(method_name(Method::Simulated)) == "simulated");
}
