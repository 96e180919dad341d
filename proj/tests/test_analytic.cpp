// Saddle-point machinery: critical point and Hessian closed forms, the
// closed-form crossing rate and fade duration, equal-parameter special
// cases, and the generic exponential-integral approximation engine.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "nrayleigh/analytic.hpp"
#include "nrayleigh/core.hpp"
#include "nrayleigh/specialfn.hpp"
#include "test_helpers.hpp"

using namespace nray;
using testutil::rel_err;

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

Eigen::VectorXd to_vec(const std::vector<double>& v) {
    Eigen::VectorXd x(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) x[static_cast<Eigen::Index>(i)] = v[i];
    return x;
}

double grad_norm(const LaplaceProblem& p, const Eigen::VectorXd& x) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double step = std::max(1e-6 * std::fabs(x[i]), 1e-8);
        Eigen::VectorXd a = x, b = x;
        a[i] += step;
        b[i] -= step;
        const double g = (p.h(a) - p.h(b)) / (2.0 * step);
        s += g * g;
    }
    return std::sqrt(s);
}

}  // namespace

TEST_CASE("critical point of the exponent") {
    const CascadeSpec unit2 = testutil::unit_cascade({1.0, 1.0});
    const std::vector<double> x2 = lcr_critical_point(unit2, 1.0);
    REQUIRE(x2.size() == 1);
    CHECK(rel_err(x2[0], 1.0) < 1e-14);

    const CascadeSpec unit3 = testutil::unit_cascade({1.0, 1.0, 1.0});
    const std::vector<double> x3 = lcr_critical_point(unit3, 8.0);
    REQUIRE(x3.size() == 2);
    CHECK(rel_err(x3[0], 2.0) < 1e-14);
    CHECK(rel_err(x3[1], 2.0) < 1e-14);

    // x_i = y^{1/N} sqrt(Omega_i) / Phi^{1/(2N)}
    const CascadeSpec uneq = testutil::hop_cascade({4.0, 1.0}, {1.0, 1.0});
    const std::vector<double> xu = lcr_critical_point(uneq, 1.0);
    CHECK(rel_err(xu[0], std::sqrt(2.0)) < 1e-14);

    CHECK_THROWS_AS(lcr_critical_point(testutil::unit_cascade({1.0}), 1.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(lcr_critical_point(unit2, 0.0), std::domain_error);
}

TEST_CASE("Hessian closed forms at the critical point") {
    const CascadeSpec c2 = testutil::hop_cascade({1.0, 0.3}, {1.0, 1.0});
    const LcrHessian h2 = lcr_hessian(c2);
    REQUIRE(h2.matrix.rows() == 1);
    CHECK(rel_err(h2.matrix(0, 0), 8.0) < 1e-14);
    CHECK(rel_err(h2.analytic_det, 8.0) < 1e-14);
    REQUIRE(h2.analytic_eigenvalues.size() == 1);
    CHECK(rel_err(h2.analytic_eigenvalues[0], 8.0) < 1e-14);

    const CascadeSpec c3 = testutil::hop_cascade({1.0, 1.0, 5.0}, {1.0, 1.0, 1.0});
    const LcrHessian h3 = lcr_hessian(c3);
    REQUIRE(h3.matrix.rows() == 2);
    CHECK(rel_err(h3.matrix(0, 0), 8.0) < 1e-14);
    CHECK(rel_err(h3.matrix(0, 1), 4.0) < 1e-14);
    CHECK(rel_err(h3.matrix(1, 0), 4.0) < 1e-14);
    CHECK(rel_err(h3.matrix(1, 1), 8.0) < 1e-14);
    CHECK(rel_err(h3.analytic_det, 48.0) < 1e-14);
    std::vector<double> eig3 = h3.analytic_eigenvalues;
    std::sort(eig3.begin(), eig3.end());
    CHECK(rel_err(eig3[0], 4.0) < 1e-14);
    CHECK(rel_err(eig3[1], 12.0) < 1e-14);

    SUBCASE("unequal leading powers: determinant exact, eigenvalue list not") {
        const CascadeSpec cu = testutil::hop_cascade({2.0, 1.0, 5.0}, {1.0, 1.0, 1.0});
        const LcrHessian hu = lcr_hessian(cu);
        CHECK(rel_err(hu.analytic_det, 24.0) < 1e-14);
        CHECK(rel_err(hu.matrix.determinant(), 24.0) < 1e-12);

        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hu.matrix);
        const double lo = es.eigenvalues()[0], hi = es.eigenvalues()[1];
        CHECK(rel_err(lo, 6.0 - std::sqrt(12.0)) < 1e-12);
        CHECK(rel_err(hi, 6.0 + std::sqrt(12.0)) < 1e-12);

        // the closed eigenvalue list {4/Omega_i, 4N/Omega_{N-1}} keeps the
        // product but not the individual values once leading powers differ
        std::vector<double> eu = hu.analytic_eigenvalues;
        std::sort(eu.begin(), eu.end());
        CHECK(rel_err(eu[0] * eu[1], lo * hi) < 1e-12);
        CHECK(rel_err(eu[0], lo) > 1e-3);
    }

    CHECK_THROWS_AS(lcr_hessian(testutil::unit_cascade({1.0})), std::invalid_argument);
}

TEST_CASE("Hessian formulas across random cascades") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> upow(0.3, 3.0);
    for (int n = 2; n <= 6; ++n) {
        for (int rep = 0; rep < 20; ++rep) {
            CAPTURE(n);
            CAPTURE(rep);
            // equal leading powers: the full eigenvalue list is exact
            const double w = upow(rng);
            std::vector<double> omegas(static_cast<std::size_t>(n), w);
            omegas.back() = upow(rng);
            const CascadeSpec ceq =
                testutil::hop_cascade(omegas, std::vector<double>(omegas.size(), 1.0));
            const LcrHessian heq = lcr_hessian(ceq);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(heq.matrix);
            std::vector<double> want = heq.analytic_eigenvalues;
            std::sort(want.begin(), want.end());
            REQUIRE(static_cast<int>(want.size()) == n - 1);
            for (int i = 0; i < n - 1; ++i)
                CHECK(rel_err(es.eigenvalues()[i], want[static_cast<std::size_t>(i)]) < 1e-9);
            CHECK(rel_err(heq.matrix.determinant(), heq.analytic_det) < 1e-9);

            // arbitrary powers: determinant formula still exact
            std::vector<double> rnd(static_cast<std::size_t>(n));
            for (double& v : rnd) v = upow(rng);
            const CascadeSpec crnd =
                testutil::hop_cascade(rnd, std::vector<double>(rnd.size(), 1.0));
            const LcrHessian hr = lcr_hessian(crnd);
            CHECK(rel_err(hr.matrix.determinant(), hr.analytic_det) < 1e-9);
        }
    }
}

TEST_CASE("exponent is stationary at the closed-form critical point") {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> upow(0.3, 3.0), uf(0.2, 5.0), uy(0.2, 2.0);
    for (int n = 2; n <= 6; ++n) {
        CAPTURE(n);
        std::vector<double> omegas(static_cast<std::size_t>(n)), fs(static_cast<std::size_t>(n));
        for (auto& v : omegas) v = upow(rng);
        for (auto& v : fs) v = uf(rng);
        const CascadeSpec c = testutil::hop_cascade(omegas, fs);
        const double y = uy(rng);
        const LaplaceProblem prob = lcr_laplace_problem(c, y);
        const Eigen::VectorXd xc = to_vec(lcr_critical_point(c, y));
        const double at_crit = grad_norm(prob, xc);
        const double away = grad_norm(prob, 2.0 * xc);
        CHECK(at_crit <= 1e-6 * away);
    }
}

TEST_CASE("closed-form rate pins and single-hop reduction") {
    const CascadeSpec unit2 = testutil::unit_cascade({1.0, 1.0});
    CHECK(rel_err(laplace_lcr(unit2, 1.0), 0.85033666317527266) < 1e-12);
    const CascadeSpec unit3 = testutil::unit_cascade({1.0, 1.0, 1.0});
    CHECK(rel_err(laplace_lcr(unit3, 1.0), 0.78412690713487204) < 1e-12);

    CHECK(rel_err(rayleigh_lcr(1.0, 1.0, 1.0), 0.92213700889578910) < 1e-15);
    // peak of the single-hop rate sits at sqrt(Omega/2)
    for (double om : {0.5, 1.0, 3.7}) {
        const double peak = rayleigh_lcr(om, 2.0, std::sqrt(om / 2.0));
        CHECK(rel_err(peak, 2.0 * std::sqrt(kPi) * std::exp(-0.5)) < 1e-14);
    }

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> uo(0.2, 5.0), uf(0.1, 10.0), uy(0.05, 3.0);
    for (int rep = 0; rep < 50; ++rep) {
        const double om = uo(rng), f = uf(rng), y = uy(rng);
        CAPTURE(om);
        CAPTURE(f);
        CAPTURE(y);
        const CascadeSpec c1 = testutil::hop_cascade({om}, {f});
        CHECK(rel_err(laplace_lcr(c1, y), rayleigh_lcr(om, f, y)) < 1e-12);
    }

    CHECK_THROWS_AS(laplace_lcr(unit2, 0.0), std::domain_error);
    CHECK_THROWS_AS(laplace_lcr(testutil::unit_cascade({0.0, 0.0}), 1.0), std::domain_error);
    CHECK_THROWS_AS(rayleigh_lcr(0.0, 1.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(rayleigh_lcr(1.0, -1.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(rayleigh_lcr(1.0, 1.0, 0.0), std::domain_error);
}

TEST_CASE("closed-form rate is invariant under threshold/power rescaling") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> upow(0.3, 3.0), uf(0.2, 5.0);
    const double c = 3.7;
    for (int n = 2; n <= 4; ++n) {
        CAPTURE(n);
        std::vector<double> omegas(static_cast<std::size_t>(n)), fs(static_cast<std::size_t>(n));
        for (auto& v : omegas) v = upow(rng);
        for (auto& v : fs) v = uf(rng);
        const CascadeSpec base = testutil::hop_cascade(omegas, fs);
        std::vector<double> scaled = omegas;
        for (double& v : scaled) v *= std::pow(c, 2.0 / n);
        const CascadeSpec big = testutil::hop_cascade(scaled, fs);
        const double y = 0.8;
        CHECK(rel_err(laplace_lcr(big, c * y), laplace_lcr(base, y)) < 1e-12);
    }
}

TEST_CASE("duration times rate equals the distribution function") {
    const CascadeSpec c = testutil::hop_cascade({2.0, 0.7, 1.4}, {1.0, 2.0, 0.5});
    for (int k = 0; k < 20; ++k) {
        const double db = -20.0 + 26.0 * k / 19.0;
        const double y = threshold_db_to_amplitude(db, phi(c));
        CAPTURE(db);
        const double prod = laplace_afd(c, y) * laplace_lcr(c, y);
        CHECK(rel_err(prod, cdf_product_rayleigh(y, c)) < 1e-12);
    }
}

TEST_CASE("rate and duration shapes on relay chains") {
    const double s = std::pow(10.0, 0.5);  // 5 dB per hop
    for (std::size_t n : {2u, 3u, 5u}) {
        CAPTURE(n);
        const CascadeSpec c = testutil::semi_blind_chain(std::vector<double>(n, s), 1.0);
        const ThresholdGrid grid = ThresholdGrid::from_db_range(-30.0, 10.0, 0.5);
        std::vector<double> lcr, afd;
        for (double y : grid.values) {
            lcr.push_back(laplace_lcr(c, y));
            afd.push_back(laplace_afd(c, y));
        }
        for (std::size_t i = 1; i < afd.size(); ++i) CHECK(afd[i] > afd[i - 1]);
        const std::size_t peak = static_cast<std::size_t>(
            std::max_element(lcr.begin(), lcr.end()) - lcr.begin());
        for (std::size_t i = 1; i <= peak; ++i) CHECK(lcr[i] > lcr[i - 1]);
        for (std::size_t i = peak + 1; i < lcr.size(); ++i) CHECK(lcr[i] < lcr[i - 1]);
    }
}

TEST_CASE("equal-parameter special cases match their general cascades") {
    const std::vector<double> ys = {0.1, 0.5, 1.0, 2.0};

    SUBCASE("every node mobile") {
        const std::size_t n = 3;
        const double fm = 7.0, pw = 2.5;
        CascadeSpec equiv = testutil::node_cascade(
            std::vector<double>(n, std::pow(pw, 1.0 / n)), std::vector<double>(n + 1, fm));
        for (double y : ys) {
            CAPTURE(y);
            CHECK(rel_err(special_case_lcr(SpecialScenario::AllMobileEqualDoppler, n, fm, pw, y),
                          laplace_lcr(equiv, y)) < 1e-12);
        }
    }
    SUBCASE("fixed destination") {
        const std::size_t n = 4;
        const double fm = 3.0, pw = 1.3;
        std::vector<double> nodes(n + 1, fm);
        nodes.back() = 0.0;
        CascadeSpec equiv =
            testutil::node_cascade(std::vector<double>(n, std::pow(pw, 1.0 / n)), nodes);
        for (double y : ys) {
            CAPTURE(y);
            CHECK(rel_err(
                      special_case_lcr(SpecialScenario::FixedDestinationEqualDoppler, n, fm, pw, y),
                      laplace_lcr(equiv, y)) < 1e-12);
        }
    }
    SUBCASE("independent identical hops") {
        const std::size_t n = 5;
        const double fm = 2.0, pw = 0.8;  // per-hop mean power
        CascadeSpec equiv = testutil::hop_cascade(std::vector<double>(n, pw),
                                                  std::vector<double>(n, fm));
        for (double y : ys) {
            CAPTURE(y);
            CHECK(rel_err(special_case_lcr(SpecialScenario::IidEqualPower, n, fm, pw, y),
                          laplace_lcr(equiv, y)) < 1e-12);
        }
        // single hop collapses to the textbook rate
        CHECK(rel_err(special_case_lcr(SpecialScenario::IidEqualPower, 1, 2.0, 0.8, 0.5),
                      rayleigh_lcr(0.8, 2.0, 0.5)) < 1e-12);
    }
    SUBCASE("argument guards") {
        CHECK_THROWS_AS(
            special_case_lcr(SpecialScenario::AllMobileEqualDoppler, 0, 1.0, 1.0, 1.0),
            std::invalid_argument);
        CHECK_THROWS_AS(
            special_case_lcr(SpecialScenario::AllMobileEqualDoppler, 2, 0.0, 1.0, 1.0),
            std::domain_error);
        CHECK_THROWS_AS(
            special_case_lcr(SpecialScenario::IidEqualPower, 2, 1.0, -1.0, 1.0),
            std::domain_error);
        CHECK_THROWS_AS(
            special_case_lcr(SpecialScenario::IidEqualPower, 2, 1.0, 1.0, 0.0),
            std::domain_error);
        CHECK_THROWS_AS(special_case_lcr(static_cast<SpecialScenario>(99), 2, 1.0, 1.0, 1.0),
                        std::invalid_argument);
    }
}

TEST_CASE("generic approximation engine on Gaussian integrals") {
    SUBCASE("one dimension") {
        LaplaceProblem p;
        p.dimension = 1;
        p.u = [](const Eigen::VectorXd&) { return 1.0; };
        p.h = [](const Eigen::VectorXd& x) { return x[0] * x[0]; };
        p.lambda = 1.0;
        Eigen::VectorXd x0(1);
        x0 << 0.7;
        const LaplaceResult r = generic_laplace_approx(p, x0);
        CHECK(rel_err(r.approx_value, std::sqrt(kPi)) < 1e-10);
        CHECK(std::fabs(r.critical_point[0]) < 1e-6);
        CHECK(std::fabs(r.h_at_crit) < 1e-12);
        CHECK(rel_err(r.det_a, 2.0) < 1e-5);
    }
    SUBCASE("two dimensions, sharper exponent") {
        LaplaceProblem p;
        p.dimension = 2;
        p.u = [](const Eigen::VectorXd&) { return 1.0; };
        p.h = [](const Eigen::VectorXd& x) { return x.squaredNorm(); };
        p.lambda = 4.0;
        Eigen::VectorXd x0(2);
        x0 << 0.4, -0.3;
        const LaplaceResult r = generic_laplace_approx(p, x0);
        CHECK(rel_err(r.approx_value, kPi / 4.0) < 1e-10);
    }
    SUBCASE("anisotropic quadratic with non-unit weight") {
        LaplaceProblem p;
        p.dimension = 2;
        p.u = [](const Eigen::VectorXd&) { return 2.0; };
        p.h = [](const Eigen::VectorXd& x) { return x[0] * x[0] + 5.0 * x[1] * x[1]; };
        p.lambda = 2.0;
        Eigen::VectorXd x0(2);
        x0 << 1.0, 0.5;
        const LaplaceResult r = generic_laplace_approx(p, x0);
        CHECK(rel_err(r.approx_value, 2.0 * kPi / std::sqrt(20.0)) < 1e-9);
    }
    SUBCASE("saddle exponents are rejected") {
        LaplaceProblem p;
        p.dimension = 2;
        p.u = [](const Eigen::VectorXd&) { return 1.0; };
        p.h = [](const Eigen::VectorXd& x) { return x[0] * x[0] - x[1] * x[1]; };
        p.lambda = 1.0;
        Eigen::VectorXd x0(2);
        x0 << 0.3, 0.2;
        CHECK_THROWS(generic_laplace_approx(p, x0));
    }
    SUBCASE("argument guards") {
        LaplaceProblem p;  // callables missing
        Eigen::VectorXd x0(1);
        x0 << 0.0;
        CHECK_THROWS_AS(generic_laplace_approx(p, x0), std::invalid_argument);
        p.u = [](const Eigen::VectorXd&) { return 1.0; };
        p.h = [](const Eigen::VectorXd& x) { return x.squaredNorm(); };
        p.lambda = -1.0;
        CHECK_THROWS_AS(generic_laplace_approx(p, x0), std::invalid_argument);
        p.lambda = 1.0;
        Eigen::VectorXd wrong(2);
        wrong << 0.0, 0.0;
        CHECK_THROWS_AS(generic_laplace_approx(p, wrong), std::invalid_argument);
    }
}

TEST_CASE("engine reproduces the closed-form rate") {
    struct Case {
        CascadeSpec c;
        double y;
    };
    const std::vector<Case> cases = {
        {testutil::unit_cascade({1.0, 1.0}), 1.0},
        {testutil::hop_cascade({2.0, 1.0, 0.5}, {1.0, 2.0, 0.5}), 0.8},
    };
    for (const auto& cs : cases) {
        const std::size_t n = cs.c.size();
        CAPTURE(n);
        const LaplaceProblem prob = lcr_laplace_problem(cs.c, cs.y);
        CHECK(prob.dimension == static_cast<int>(n) - 1);
        CHECK(prob.lambda == 1.0);

        const std::vector<double> omegas = effective_powers(cs.c);
        const std::vector<double> fs = effective_dopplers(cs.c);
        const double f_last = fs.back();
        double sum_f_sq = 0.0;
        for (double f : fs) sum_f_sq += f * f;
        const double big_phi = phi(cs.c);
        const double z = cs.y * cs.y / big_phi;

        // closed values of the weight and exponent at the critical point
        const Eigen::VectorXd xc = to_vec(lcr_critical_point(cs.c, cs.y));
        CHECK(rel_err(prob.u(xc), std::sqrt(sum_f_sq) / f_last) < 1e-12);
        CHECK(rel_err(prob.h(xc), n * std::pow(z, 1.0 / n)) < 1e-12);

        const LaplaceResult res = generic_laplace_approx(prob, 1.15 * xc);
        CHECK((res.critical_point - xc).norm() <= 1e-6 * xc.norm());
        CHECK(rel_err(res.u_at_crit, std::sqrt(sum_f_sq) / f_last) < 1e-8);
        CHECK(rel_err(res.h_at_crit, n * std::pow(z, 1.0 / n)) < 1e-10);

        const double sigma_last = kPi * std::sqrt(omegas.back()) * f_last;
        const double prefactor = std::pow(2.0, static_cast<double>(n)) * cs.y * sigma_last /
                                 (std::sqrt(2.0 * kPi) * big_phi);
        CHECK(rel_err(prefactor * res.approx_value, laplace_lcr(cs.c, cs.y)) < 1e-4);
    }
}
