#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "rwre/env.hpp"

using namespace rwre;

namespace {
const ProbTriple kRight{0.2, 0.4, 0.4};
}

TEST_CASE("point mass site law returns the atom everywhere") {
    const EnvModel m = EnvModel::point_mass(kRight);
    for (std::int64_t site : {-1000000LL, -3LL, 0LL, 7LL, 999999LL}) {
        const ProbTriple t = site_law(m, 42, site);
        CHECK(t.left == kRight.left);
        CHECK(t.one == kRight.one);
        CHECK(t.two == kRight.two);
    }
}

TEST_CASE("site law is a pure function of (model, seed, site)") {
    const EnvModel m = EnvModel::dirichlet_floor({1.0, 1.0, 1.0}, 0.05);
    Xoshiro256pp pick(7);
    for (int i = 0; i < 200; ++i) {
        const std::uint64_t seed = pick.next();
        const std::int64_t site = static_cast<std::int64_t>(pick.next() % 4001) - 2000;
        const ProbTriple a = site_law(m, seed, site);
        const ProbTriple b = site_law(m, seed, site);
        CHECK(a.left == b.left);
        CHECK(a.one == b.one);
        CHECK(a.two == b.two);
    }
}

TEST_CASE("mixture atom frequency over 10^4 sites") {
    const EnvModel m = EnvModel::finite_mixture({{0.1, 0.2, 0.7}, {0.6, 0.3, 0.1}}, {0.5, 0.5});
    int first = 0;
    const int n = 10000;
    for (int site = 0; site < n; ++site) {
        if (site_law(m, 2024, site).left == 0.1) ++first;
    }
    const double freq = static_cast<double>(first) / n;
    CHECK(std::fabs(freq - 0.5) < 0.015);  // 3 binomial SE
}

TEST_CASE("mixture chi-square goodness of fit at the 0.999 level") {
    const EnvModel m =
        EnvModel::finite_mixture({{0.1, 0.2, 0.7}, {0.3, 0.4, 0.3}, {0.6, 0.3, 0.1}},
                                 {0.25, 0.35, 0.40});
    const int n = 10000;
    int counts[3] = {0, 0, 0};
    for (int site = 0; site < n; ++site) {
        const double left = site_law(m, 99, site).left;
        if (left == 0.1) ++counts[0];
        else if (left == 0.3) ++counts[1];
        else ++counts[2];
    }
    const double expected[3] = {0.25 * n, 0.35 * n, 0.40 * n};
    double chi2 = 0.0;
    for (int i = 0; i < 3; ++i) {
        chi2 += (counts[i] - expected[i]) * (counts[i] - expected[i]) / expected[i];
    }
    CHECK(chi2 < testing::chi2_crit_999(2));
}

TEST_CASE("realize_window basics and overlap consistency") {
    const EnvModel m = EnvModel::point_mass(kRight);
    const Environment env = realize_window(m, 5, -3, 3);
    CHECK(env.hi() - env.lo() + 1 == 7);
    for (std::int64_t i = -3; i <= 3; ++i) {
        CHECK(env.at(i).sum() == doctest::Approx(1.0).epsilon(1e-12));
    }
    const EnvModel d = EnvModel::dirichlet_floor({1.0, 1.0, 1.0}, 0.05);
    const Environment a = realize_window(d, 11, -3, 3);
    const Environment b = realize_window(d, 11, -1, 5);
    for (std::int64_t i = -1; i <= 3; ++i) {
        CHECK(a.at(i).left == b.at(i).left);
        CHECK(a.at(i).one == b.at(i).one);
        CHECK(a.at(i).two == b.at(i).two);
    }
    CHECK_THROWS_AS(realize_window(m, 5, 2, 1), InvalidWindowError);
}

TEST_CASE("extending a window never changes realized sites") {
    const EnvModel d = EnvModel::dirichlet_floor({2.0, 0.5, 1.3}, 0.0);
    Xoshiro256pp pick(13);
    for (int i = 0; i < 50; ++i) {
        const std::uint64_t seed = pick.next();
        const std::int64_t lo = static_cast<std::int64_t>(pick.next() % 100) - 50;
        const std::int64_t hi = lo + static_cast<std::int64_t>(pick.next() % 60);
        const Environment env = realize_window(d, seed, lo, hi);
        const Environment big = env.extended(lo - 17, hi + 29);
        for (std::int64_t s = lo; s <= hi; ++s) {
            CHECK(env.at(s).left == big.at(s).left);
            CHECK(env.at(s).two == big.at(s).two);
        }
    }
}

TEST_CASE("dirichlet floor keeps every component above the floor") {
    const EnvModel d = EnvModel::dirichlet_floor({1.0, 1.0, 1.0}, 0.05);
    for (int site = -1000; site < 1000; ++site) {
        const ProbTriple t = site_law(d, 321, site);
        CHECK(t.min_component() >= 0.05);
        CHECK(std::fabs(t.sum() - 1.0) <= 1e-12);
    }
    // shapes below 1 exercise the boosted gamma path
    const EnvModel d2 = EnvModel::dirichlet_floor({0.5, 2.0, 0.7}, 0.0);
    for (int site = 0; site < 500; ++site) {
        const ProbTriple t = site_law(d2, 321, site);
        CHECK(t.min_component() >= 0.0);
        CHECK(std::fabs(t.sum() - 1.0) <= 1e-12);
    }
}

TEST_CASE("model validation rejects malformed inputs") {
    CHECK_THROWS_AS(EnvModel::point_mass(ProbTriple{0.5, 0.4, 0.2}), InvariantViolationError);
    CHECK_THROWS_AS(EnvModel::point_mass(ProbTriple{-0.1, 0.6, 0.5}), InvariantViolationError);
    CHECK_THROWS_AS(EnvModel::finite_mixture({{0.2, 0.4, 0.4}}, {0.9}), InvariantViolationError);
    CHECK_THROWS_AS(EnvModel::point_mass(ProbTriple{0.01, 0.49, 0.5}, 0.05),
                    InvariantViolationError);
    CHECK_THROWS_AS(EnvModel::dirichlet_floor({1.0, -1.0, 1.0}, 0.05), InvariantViolationError);
    // degenerate triples are accepted with floor 0 and flagged
    const EnvModel deg = EnvModel::point_mass(ProbTriple{0.0, 0.0, 1.0});
    CHECK(deg.has_zero_component());
    CHECK(deg.never_steps_left());
    CHECK(!deg.admits_transfer_matrices());
}
