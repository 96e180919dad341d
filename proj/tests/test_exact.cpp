// Exact crossing-rate quadrature: pinned references, agreement between
// the tensor-product path and the 1-D dual-hop fast path, symmetry and
// scaling properties, and a Monte-Carlo cross-check.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "nrayleigh/core.hpp"
#include "nrayleigh/exact.hpp"
#include "nrayleigh/quadrature.hpp"
#include "nrayleigh/simulator.hpp"
#include "nrayleigh/specialfn.hpp"
#include "test_helpers.hpp"

using namespace nray;
using testutil::rel_err;

TEST_CASE("dual-hop pinned references") {
    const CascadeSpec unit2 = testutil::unit_cascade({1.0, 1.0});
    CHECK(rel_err(exact_lcr_dualhop(unit2, 1.0), 0.88865974675164547) < 1e-7);
    CHECK(rel_err(exact_lcr(unit2, 1.0), 0.88865974675164547) < 1e-7);

    const CascadeSpec uneq = testutil::hop_cascade({2.5, 0.7}, {1.3, 0.6});
    CHECK(rel_err(exact_lcr_dualhop(uneq, 0.9), 1.1531560353107134) < 1e-7);

    // deep below the median, where the rate has decayed by a decade
    CHECK(rel_err(exact_lcr_dualhop(unit2, 0.05), 0.34506) < 5e-5);

    // vanishing threshold drives the rate to zero
    CHECK(exact_lcr_dualhop(unit2, 1e-8) < 1e-6);
}

TEST_CASE("tensor quadrature matches the dual-hop fast path") {
    const CascadeSpec uneq = testutil::hop_cascade({2.5, 0.7}, {1.3, 0.6});
    const double norm = phi(uneq);
    for (int k = 0; k < 30; ++k) {
        const double db = -25.0 + k * 30.0 / 29.0;
        const double y = threshold_db_to_amplitude(db, norm);
        CAPTURE(db);
        const double tensor = exact_lcr(uneq, y);
        const double direct = exact_lcr_dualhop(uneq, y);
        CHECK(rel_err(tensor, direct) < 1e-6);
    }
}

TEST_CASE("both integration layouts agree") {
    QuadratureSpec log_map;
    log_map.mapping = MappingTag::LogSubstitution;
    const CascadeSpec uneq2 = testutil::hop_cascade({2.5, 0.7}, {1.3, 0.6});
    const CascadeSpec unit3 = testutil::unit_cascade({1.0, 1.0, 1.0});
    for (double y : {0.1, 0.4, 0.9, 1.5, 2.5}) {
        CAPTURE(y);
        CHECK(rel_err(exact_lcr(uneq2, y, log_map), exact_lcr(uneq2, y)) < 5e-7);
        CHECK(rel_err(exact_lcr(unit3, y, log_map), exact_lcr(unit3, y)) < 5e-7);
    }
}

TEST_CASE("dual-hop symmetries") {
    // joint rescale of threshold and powers leaves the rate unchanged
    const double c = 2.37;
    const CascadeSpec base = testutil::hop_cascade({1.8, 0.9}, {0.8, 1.7});
    const CascadeSpec scaled = testutil::hop_cascade({c * 1.8, c * 0.9}, {0.8, 1.7});
    for (double y : {0.3, 1.0})
        CHECK(rel_err(exact_lcr_dualhop(scaled, c * y), exact_lcr_dualhop(base, y)) < 1e-6);

    // with one static terminal the hops can trade places
    const CascadeSpec a = testutil::hop_cascade({2.0, 0.6}, {1.4, 0.0});
    const CascadeSpec b = testutil::hop_cascade({0.6, 2.0}, {0.0, 1.4});
    for (double y : {0.3, 0.8})
        CHECK(rel_err(exact_lcr_dualhop(a, y), exact_lcr_dualhop(b, y)) < 1e-6);
}

TEST_CASE("multihop pinned references and permutation invariance") {
    const CascadeSpec unit3 = testutil::unit_cascade({1.0, 1.0, 1.0});
    CHECK(rel_err(exact_lcr(unit3, 1.0), 0.82246245283692224) < 1e-6);

    const std::vector<double> om = {2.0, 1.0, 0.5};
    const std::vector<double> fs = {1.0, 2.0, 0.5};
    const CascadeSpec c3 = testutil::hop_cascade(om, fs);
    CHECK(rel_err(exact_lcr(c3, 0.8), 1.2864008017793488) < 1e-6);

    // hop order cannot matter: the product process is commutative
    const CascadeSpec rot1 = testutil::hop_cascade({1.0, 0.5, 2.0}, {2.0, 0.5, 1.0});
    const CascadeSpec rot2 = testutil::hop_cascade({0.5, 2.0, 1.0}, {0.5, 1.0, 2.0});
    CHECK(rel_err(exact_lcr(rot1, 0.8), 1.2864008017793488) < 1e-6);
    CHECK(rel_err(exact_lcr(rot2, 0.8), 1.2864008017793488) < 1e-6);

    const CascadeSpec c4 = testutil::hop_cascade({1.0, 1.0, 1.0, 1.0}, {1.0, 1.5, 0.7, 1.2});
    CHECK(rel_err(exact_lcr(c4, 0.3), 1.585557108221) < 1e-6);
}

TEST_CASE("duration composition and positivity") {
    const CascadeSpec unit2 = testutil::unit_cascade({1.0, 1.0});
    CHECK(rel_err(exact_afd(unit2, 1.0), 0.72026823636695515 / 0.88865974675164547) < 1e-7);

    const double norm = phi(unit2);
    double prev_afd = 0.0;
    for (int k = 0; k <= 5; ++k) {
        const double db = -4.0 + 2.0 * k;
        const double y = threshold_db_to_amplitude(db, norm);
        CAPTURE(db);
        const double rate = exact_lcr(unit2, y);
        const double afd = exact_afd(unit2, y);
        CHECK(rate > 0.0);
        CHECK(afd > 0.0);
        CHECK(rel_err(afd * rate, cdf_product_rayleigh(y, unit2)) < 1e-12);
        CHECK(afd > prev_afd);  // durations lengthen with the threshold
        prev_afd = afd;
    }
}

TEST_CASE("guard rails") {
    const CascadeSpec unit2 = testutil::unit_cascade({1.0, 1.0});
    CHECK_THROWS_AS(exact_lcr(testutil::unit_cascade({1.0}), 1.0), std::invalid_argument);
    CHECK_THROWS_AS(exact_lcr(testutil::unit_cascade({1.0, 1.0, 1.0, 1.0, 1.0}), 1.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(exact_lcr(unit2, 0.0), std::domain_error);
    CHECK_THROWS_AS(exact_lcr(unit2, -1.0), std::domain_error);
    CHECK_THROWS_AS(exact_lcr(testutil::unit_cascade({0.0, 0.0}), 1.0), std::domain_error);
    CHECK_THROWS_AS(exact_lcr_dualhop(testutil::unit_cascade({1.0, 1.0, 1.0}), 1.0),
                    std::invalid_argument);

    QuadratureSpec q;
    q.rel_tol = 0.0;
    CHECK_THROWS_AS(exact_lcr(unit2, 1.0, q), std::invalid_argument);
    q = QuadratureSpec{};
    q.node_budget = 8;
    CHECK_THROWS_AS(exact_lcr(unit2, 1.0, q), std::invalid_argument);

    // a budget too small to refine even once cannot certify convergence
    q = QuadratureSpec{};
    q.node_budget = 16;
    CHECK_THROWS_AS(exact_lcr(testutil::unit_cascade({1.0, 1.0, 1.0}), 1.0, q),
                    ConvergenceError);
}

TEST_CASE("quadrature agrees with a long simulated trace") {
    const CascadeSpec unit3 = testutil::unit_cascade({1.0, 1.0, 1.0});
    TraceSpec t;
    t.sample_rate = default_sample_rate(unit3);  // 384 Hz
    t.duration = 1.0e7 / t.sample_rate;
    t.seed = 99;
    ThresholdGrid grid;
    grid.values = {1.0};
    const SimEstimate est = estimate_cascade_taps(unit3, {3}, {grid}, t)[0];
    const double reference = exact_lcr(unit3, 1.0);
    CHECK(rel_err(est.lcr[0], reference) < 0.05);
    CHECK(rel_err(est.afd[0], exact_afd(unit3, 1.0)) < 0.05);
}
