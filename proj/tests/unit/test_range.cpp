#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "rwre/range.hpp"
#include "rwre/stats.hpp"
#include "rwre/walk.hpp"

using namespace rwre;

TEST_CASE("theta from block means is the closed-form ratio") {
    BlockStats s;
    s.n_blocks = 40;
    s.mean_x = 2.0;
    s.se_x = 0.0;
    CHECK(theta_renewal(s).first == doctest::Approx(0.5));
    s.mean_x = 4.0;
    CHECK(theta_renewal(s).first == doctest::Approx(0.75));

    s.mean_x = 1.5;
    CHECK_THROWS_AS(theta_renewal(s), InvariantViolationError);
    s.mean_x = 3.0;
    s.n_blocks = 10;
    CHECK_THROWS_AS(theta_renewal(s), InsufficientDataError);
}

TEST_CASE("deterministic walks pin the visited fraction") {
    const std::int64_t x_max = 10000;
    {
        const RangeStats rs = range_count(EnvModel::point_mass(ProbTriple{0.0, 0.0, 1.0}), 3,
                                          x_max, 100, 100000000);
        CHECK(std::fabs(rs.theta_direct - 0.5) <= 2.0 / static_cast<double>(x_max));
        CHECK(rs.census_exact);
        CHECK(rs.theta_renewal == doctest::Approx(0.5));
    }
    {
        const RangeStats rs = range_count(EnvModel::point_mass(ProbTriple{0.0, 1.0, 0.0}), 3,
                                          x_max, 100, 100000000);
        CHECK(rs.theta_direct == 1.0);
        CHECK(rs.skipped_in_range == 0);
        CHECK(rs.n_nu_epochs == 0);
    }
    {
        // nearest-neighbor random environment with right drift: unit steps
        // cannot skip a site
        const EnvModel nn =
            EnvModel::finite_mixture({{0.3, 0.7, 0.0}, {0.2, 0.8, 0.0}}, {0.5, 0.5});
        const RangeStats rs = range_count(nn, 3, x_max, 100, 100000000);
        CHECK(rs.theta_direct == 1.0);
        CHECK(rs.n_nu_epochs == 0);
    }
}

TEST_CASE("range census and estimator agreement on a right-transient point mass") {
    const EnvModel m = EnvModel::point_mass(ProbTriple{0.2, 0.4, 0.4});
    const std::int64_t x_max = 20000;
    const RangeStats rs = range_count(m, 11, x_max, 200, 100000000);

    CHECK(rs.census_exact);
    CHECK(rs.skipped_up_to_last_nu == rs.n_nu_epochs);
    // counting identity: theta * x_max = N - 1 exactly
    CHECK(rs.theta_direct * static_cast<double>(x_max) ==
          doctest::Approx(static_cast<double>(rs.n_visited - 1)).epsilon(1e-12));
    CHECK(rs.n_visited == (x_max + 1) - rs.skipped_in_range);

    CHECK(rs.theta_direct > 0.0);
    CHECK(rs.theta_direct < 1.0);
    CHECK(rs.theta_renewal > 0.0);
    CHECK(rs.theta_renewal < 1.0);
    const double se = std::sqrt(rs.theta_direct_se * rs.theta_direct_se +
                                rs.theta_renewal_se * rs.theta_renewal_se);
    CHECK(std::fabs(rs.theta_direct - rs.theta_renewal) <= 3.0 * se);
    // the doubled window must tell the same story
    CHECK(std::fabs(rs.theta_renewal - rs.theta_renewal_2w) < 0.05);
}

TEST_CASE("block increments from disjoint seeds agree") {
    const EnvModel m = EnvModel::point_mass(ProbTriple{0.2, 0.4, 0.4});
    const RangeStats a = range_count(m, 21, 20000, 200, 100000000);
    const RangeStats b = range_count(m, 22, 20000, 200, 100000000);
    REQUIRE(a.n_blocks >= 1000);
    REQUIRE(b.n_blocks >= 1000);
    const double se = std::sqrt(a.se_x * a.se_x + b.se_x * b.se_x);
    CHECK(std::fabs(a.mean_x - b.mean_x) <= 3.0 * se);
}

TEST_CASE("each block skips exactly the site below its closing epoch") {
    const EnvModel m = EnvModel::point_mass(ProbTriple{0.2, 0.4, 0.4});
    const std::int64_t horizon = 5000 + 400;
    const Environment env(m, derive_seed(44, 1), -512, horizon + 2);
    Xoshiro256pp rng(derive_seed(44, 2));
    std::vector<std::uint8_t> visited(static_cast<std::size_t>(horizon + 3), 0);
    auto mark = [&visited](std::int64_t, std::int64_t pos) {
        if (pos >= 0) visited[static_cast<std::size_t>(pos)] = 1;
    };
    RenewalScanner scan(200);
    run_walk(env, horizon, rng, 100000000, mark, scan);
    const auto blocks = nu_blocks(scan.records());
    REQUIRE(blocks.size() >= 100);
    for (const auto& b : blocks) {
        CHECK(b.skipped_site == b.end_pos - 1);
        CHECK(visited[static_cast<std::size_t>(b.skipped_site)] == 0);
        for (std::int64_t s = b.start_pos; s < b.end_pos - 1; ++s) {
            CHECK(visited[static_cast<std::size_t>(s)] == 1);
        }
    }
}

TEST_CASE("block increment lag-1 autocorrelation is negligible") {
    const EnvModel m = EnvModel::point_mass(ProbTriple{0.2, 0.4, 0.4});
    const std::int64_t horizon = 20000 + 2 * 200;
    const Environment env(m, derive_seed(33, 1), -512, horizon + 2);
    Xoshiro256pp rng(derive_seed(33, 2));
    RenewalScanner scan(200);
    run_walk(env, horizon, rng, 100000000, scan);
    const auto blocks = nu_blocks(scan.records());
    REQUIRE(blocks.size() >= 1000);
    MeanVar mv;
    for (const auto& b : blocks) mv.add(static_cast<double>(b.x_increment));
    double num = 0.0;
    for (std::size_t i = 1; i < blocks.size(); ++i) {
        num += (static_cast<double>(blocks[i].x_increment) - mv.mean) *
               (static_cast<double>(blocks[i - 1].x_increment) - mv.mean);
    }
    const double denom = mv.m2;
    const double rho = num / denom;
    CHECK(std::fabs(rho) <= 3.0 / std::sqrt(static_cast<double>(blocks.size())));
}

TEST_CASE("range run rejects a left-transient model") {
    const EnvModel left = EnvModel::point_mass(ProbTriple{0.8, 0.1, 0.1});
    CHECK_THROWS_AS(range_count(left, 1, 2000, 100, 10000000), RegimeError);
}

TEST_CASE("tail curve on the deterministic escape model is degenerate") {
    const EnvModel two = EnvModel::point_mass(ProbTriple{0.0, 0.0, 1.0});
    const TailCurve tc = tail_estimate(two, {0, 1, 2}, 2000, 50, 5, 2);
    CHECK(tc.p_d_finite == 0.0);
    CHECK(tc.degenerate);
    CHECK(!tc.fit_ok);
}

TEST_CASE("tail curve on a right-transient point mass") {
    const EnvModel m = EnvModel::point_mass(ProbTriple{0.2, 0.4, 0.4});
    std::vector<std::int64_t> grid;
    for (std::int64_t n = 0; n <= 30; ++n) grid.push_back(n);
    const TailCurve tc = tail_estimate(m, grid, 100000, 200, 17, 0);

    CHECK(tc.p_d_finite > 0.0);
    CHECK(tc.p_d_finite <= tc.p_d_finite_2c);
    for (std::size_t i = 1; i < tc.survival.size(); ++i) {
        CHECK(tc.survival[i] <= tc.survival[i - 1]);
    }
    for (double s : tc.survival) CHECK(s <= tc.p_d_finite);
    // survival(0) = P(returned) - P(first step left)
    const double diff = tc.survival[0] - (tc.p_d_finite - 0.2);
    CHECK(std::fabs(diff) <= 3.0 * binomial_se(0.2, static_cast<std::int64_t>(tc.replicas)));
    CHECK(tc.fit_ok);
    CHECK(tc.fitted_rate > 0.0);
    CHECK(tc.fit_r2 >= 0.95);
}

TEST_CASE("tail grid validation") {
    const EnvModel m = EnvModel::point_mass(ProbTriple{0.2, 0.4, 0.4});
    CHECK_THROWS_AS(tail_estimate(m, {0, 200}, 1000, 200, 1), InvariantViolationError);
    CHECK_THROWS_AS(tail_estimate(m, {}, 1000, 200, 1), InvariantViolationError);
}
