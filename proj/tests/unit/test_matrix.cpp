#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "rwre/matrix.hpp"
#include "rwre/stats.hpp"

using namespace rwre;

TEST_CASE("transfer matrix entries from direct substitution") {
    const Matrix2 a = transfer_matrix(ProbTriple{0.2, 0.4, 0.4});
    CHECK(a.a11 == doctest::Approx(4.0));
    CHECK(a.a12 == doctest::Approx(2.0));
    CHECK(a.a21 == 1.0);
    CHECK(a.a22 == 0.0);

    const Matrix2 b = transfer_matrix(ProbTriple{0.8, 0.1, 0.1});
    CHECK(b.a11 == doctest::Approx(0.25));
    CHECK(b.a12 == doctest::Approx(0.125));

    const Matrix2 c = transfer_matrix(ProbTriple{0.55, 0.35, 0.10});
    CHECK(c.a11 == doctest::Approx(9.0 / 11.0));
    CHECK(c.a12 == doctest::Approx(2.0 / 11.0));

    CHECK_THROWS_AS(transfer_matrix(ProbTriple{0.0, 0.5, 0.5}), DegenerateEnvironmentError);
}

TEST_CASE("two-factor products of floored transfer matrices are positive") {
    const EnvModel d = EnvModel::dirichlet_floor({1.0, 1.0, 1.0}, 0.05);
    for (int i = 0; i < 200; ++i) {
        const Matrix2 p = transfer_matrix(site_law(d, 5, 2 * i)) *
                          transfer_matrix(site_law(d, 5, 2 * i + 1));
        CHECK(p.all_positive());
    }
}

TEST_CASE("scaled product matches the direct product for short sequences") {
    const EnvModel d = EnvModel::dirichlet_floor({1.0, 1.0, 1.0}, 0.05);
    Xoshiro256pp pick(17);
    for (int trial = 0; trial < 100; ++trial) {
        const std::uint64_t seed = pick.next();
        const int n = 1 + static_cast<int>(pick.next() % 30);
        ScaledProduct prod(4);
        Matrix2 direct = Matrix2::identity();
        for (int i = 0; i < n; ++i) {
            const Matrix2 a = transfer_matrix(site_law(d, seed, i));
            prod.append(a);
            direct = direct * a;
        }
        CHECK(prod.log_norm() == doctest::Approx(std::log(direct.max_norm())).epsilon(1e-9));
        CHECK(prod.length() == n);
    }
}

TEST_CASE("normalized factor keeps unit max-norm after renormalization") {
    const EnvModel m = EnvModel::point_mass(ProbTriple{0.2, 0.4, 0.4});
    ScaledProduct prod(16);
    for (int i = 0; i < 160; ++i) prod.append(transfer_matrix(site_law(m, 3, i)));
    CHECK(prod.normalized().max_norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("norm choice shifts the estimate by at most 2 log(n)/n") {
    const EnvModel mix = EnvModel::finite_mixture({{0.2, 0.4, 0.4}, {0.3, 0.4, 0.3}}, {0.5, 0.5});
    const std::int64_t n = 20000;
    ScaledProduct prod;
    for (std::int64_t i = 0; i < n; ++i) prod.append(transfer_matrix(site_law(mix, 9, i)));
    const double g_max = prod.log_norm() / static_cast<double>(n);
    const double g_l1 = prod.log_norm_l1() / static_cast<double>(n);
    CHECK(std::fabs(g_max - g_l1) <= 2.0 * std::log(static_cast<double>(n)) / static_cast<double>(n));
}

TEST_CASE("point-mass Lyapunov estimates match the eigenvalue oracle") {
    struct Case {
        ProbTriple t;
        Regime want;
    };
    const Case cases[] = {
        {{0.2, 0.4, 0.4}, Regime::transient_right},
        {{0.8, 0.1, 0.1}, Regime::transient_left},
        {{0.55, 0.35, 0.10}, Regime::recurrent},
    };
    for (const auto& c : cases) {
        const Matrix2 a = transfer_matrix(c.t);
        const double oracle = std::log(testing::companion_spectral_radius(a.a11, a.a12));
        const RegimeReport rep = classify(EnvModel::point_mass(c.t), 31, 200000);
        CHECK(std::fabs(rep.gamma2_hat - oracle) < 0.02);
        CHECK(rep.regime == c.want);
    }
}

TEST_CASE("lyapunov preconditions") {
    const EnvModel m = EnvModel::point_mass(ProbTriple{0.2, 0.4, 0.4});
    CHECK_THROWS_AS(lyapunov_estimate(m, 1, 100, 16), InvariantViolationError);
    const EnvModel deg = EnvModel::point_mass(ProbTriple{0.0, 0.0, 1.0});
    CHECK_THROWS_AS(lyapunov_estimate(deg, 1, 100000), DegenerateEnvironmentError);
}

TEST_CASE("ld rate on a point mass is the all-or-nothing marker") {
    const EnvModel m = EnvModel::point_mass(ProbTriple{0.2, 0.4, 0.4});
    // eta below the exponent: a deterministic product never deviates
    const LdRateResult low = ld_rate_estimate(m, 1.0, {20, 40}, 1000, 77);
    for (const auto& p : low.points) {
        CHECK(p.p_hat == 0.0);
        CHECK(std::isinf(p.rate_hat));
    }
    CHECK(!low.eta_warning);
    // eta above the exponent: the event is typical
    const LdRateResult high = ld_rate_estimate(m, 2.0, {20, 40}, 1000, 77);
    CHECK(high.eta_warning);
    for (const auto& p : high.points) {
        CHECK(p.p_hat == 1.0);
        CHECK(p.rate_hat == doctest::Approx(0.0));
    }
}

TEST_CASE("ld rate on a narrow mixture: the event is below the support floor") {
    // eta = 0.8 gamma lies below even the slower atom's pure growth rate
    // (log 2.7033 vs eta about 0.997), so deviations this deep are
    // unmeasurably rare and the infinity marker is the correct output.
    const EnvModel mix = EnvModel::finite_mixture({{0.2, 0.4, 0.4}, {0.3, 0.4, 0.3}}, {0.5, 0.5});
    const double gamma = lyapunov_estimate(mix, 123, 200000).gamma2_hat;
    const LdRateResult res = ld_rate_estimate(mix, 0.8 * gamma, {20, 40, 80}, 100000, 123);
    CHECK(!res.eta_warning);
    for (const auto& p : res.points) {
        CHECK(p.p_hat == 0.0);
        CHECK(std::isinf(p.rate_hat));
    }
}

TEST_CASE("ld rate on a wide mixture: positive decaying frequencies") {
    const EnvModel mix = EnvModel::finite_mixture({{0.2, 0.4, 0.4}, {0.6, 0.3, 0.1}}, {0.5, 0.5});
    const double gamma = lyapunov_estimate(mix, 123, 200000).gamma2_hat;
    const LdRateResult res = ld_rate_estimate(mix, 0.8 * gamma, {20, 40, 80}, 100000, 123);
    CHECK(!res.eta_warning);
    REQUIRE(res.points.size() == 3);
    for (const auto& p : res.points) {
        CHECK(p.p_hat > 0.0);
        CHECK(p.rate_hat > 0.0);
        CHECK(std::isfinite(p.rate_hat));
    }
    // the deviation gets rarer as the product grows
    for (std::size_t i = 1; i < res.points.size(); ++i) {
        const auto& lo = res.points[i - 1];
        const auto& hi = res.points[i];
        const double se = binomial_se(lo.p_hat, 100000) + binomial_se(hi.p_hat, 100000);
        CHECK(hi.p_hat + 3.0 * se < lo.p_hat);
    }
}

TEST_CASE("ld rate input validation") {
    const EnvModel m = EnvModel::point_mass(ProbTriple{0.2, 0.4, 0.4});
    CHECK_THROWS_AS(ld_rate_estimate(m, 1.0, {20}, 10, 1), InvariantViolationError);
    CHECK_THROWS_AS(ld_rate_estimate(m, 1.0, {}, 2000, 1), InvariantViolationError);
}
