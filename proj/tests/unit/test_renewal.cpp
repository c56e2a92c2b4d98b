#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "rwre/renewal.hpp"

using namespace rwre;

TEST_CASE("hand-traced path: first epoch at time 4, position 4, overshoot 2") {
    // 0,2,1,2,4,6,5,7,8,9 then rising by one
    std::vector<std::int64_t> path{0, 2, 1, 2, 4, 6, 5, 7, 8, 9, 10, 11, 12};
    const auto records = renewal_scan(path, 5);
    REQUIRE(!records.empty());
    CHECK(records[0].time == 4);
    CHECK(records[0].position == 4);
    CHECK(records[0].overshoot == 2);
    // the same first epoch falls out of the direct recursion
    const auto oracle = testing::epochs_by_recursion(path, 5);
    REQUIRE(!oracle.empty());
    CHECK(oracle[0].time == 4);
    CHECK(oracle[0].position == 4);
    CHECK(oracle[0].overshoot == 2);
}

TEST_CASE("monotone paths make every time an epoch") {
    std::vector<std::int64_t> up1, up2;
    for (std::int64_t t = 0; t <= 40; ++t) up1.push_back(t);
    for (std::int64_t t = 0; t <= 40; ++t) up2.push_back(2 * t);

    const auto rec1 = renewal_scan(up1, 5);
    REQUIRE(rec1.size() == 35);  // the last 5 levels cannot confirm yet
    for (std::size_t i = 0; i < rec1.size(); ++i) {
        CHECK(rec1[i].time == static_cast<std::int64_t>(i + 1));
        CHECK(rec1[i].overshoot == 1);
    }

    const auto rec2 = renewal_scan(up2, 5);
    REQUIRE(!rec2.empty());
    for (std::size_t i = 0; i < rec2.size(); ++i) {
        CHECK(rec2[i].time == static_cast<std::int64_t>(i + 1));
        CHECK(rec2[i].overshoot == 2);
    }
    bool warn = false;
    const auto blocks = nu_blocks(rec2, &warn);
    CHECK(!warn);
    for (const auto& b : blocks) {
        CHECK(b.x_increment == 2);
        CHECK(b.skipped_site % 2 == 1);
    }
}

TEST_CASE("scanner equals the recursion evaluator on random short paths") {
    Xoshiro256pp rng(20240);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto path = testing::random_path(rng, 50);
        const std::int64_t w = 1 + static_cast<std::int64_t>(rng.uniform01() * 8);
        const auto got = renewal_scan(path, w);
        const auto want = testing::epochs_by_recursion(path, w);
        REQUIRE(got.size() == want.size());
        for (std::size_t i = 0; i < got.size(); ++i) {
            CHECK(got[i].time == want[i].time);
            CHECK(got[i].position == want[i].position);
            CHECK(got[i].overshoot == want[i].overshoot);
        }
    }
}

TEST_CASE("confirmed epochs are increasing with overshoot in {1,2}") {
    Xoshiro256pp rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        const auto path = testing::random_path(rng, 400);
        const auto records = renewal_scan(path, 6);
        for (std::size_t i = 0; i < records.size(); ++i) {
            CHECK((records[i].overshoot == 1 || records[i].overshoot == 2));
            if (i > 0) {
                CHECK(records[i].time > records[i - 1].time);
                CHECK(records[i].position > records[i - 1].position);
            }
        }
    }
}

TEST_CASE("a stream with no confirmable epoch starves the scanner") {
    std::vector<std::int64_t> path{0, 1, 2, 3, 4, 5};
    const auto records = renewal_scan(path, 50);
    CHECK(records.empty());
    RenewalScanner scanner(50);
    for (std::size_t t = 0; t < path.size(); ++t) scanner(static_cast<std::int64_t>(t), path[t]);
    CHECK(scanner.starved());
    CHECK(scanner.pending_count() == 5);
}

TEST_CASE("nu block assembly") {
    // hand-traced path extended by +1 steps only: one double-jump epoch, no
    // complete block
    std::vector<std::int64_t> path{0, 2, 1, 2, 4, 6, 5, 7, 8, 9};
    for (std::int64_t v = 10; v <= 30; ++v) path.push_back(v);
    const auto records = renewal_scan(path, 5);
    bool warn = false;
    const auto blocks = nu_blocks(records, &warn);
    CHECK(blocks.empty());
    CHECK(warn);

    bool warn_empty = false;
    CHECK(nu_blocks({}, &warn_empty).empty());
    CHECK(warn_empty);
}

TEST_CASE("block statistics arithmetic") {
    std::vector<NuBlock> same(40, NuBlock{0, 2, 2, 3, 1});
    const BlockStats a = block_stats(same);
    CHECK(a.mean_x == doctest::Approx(2.0));
    CHECK(a.se_x == doctest::Approx(0.0));

    const BlockStats b = block_stats({NuBlock{0, 2, 2, 3, 1}, NuBlock{2, 6, 4, 9, 5}});
    CHECK(b.mean_x == doctest::Approx(3.0));

    CHECK_THROWS_AS(block_stats({}), InsufficientDataError);
}

TEST_CASE("identity report on the deterministic double-jump walk") {
    const EnvModel two = EnvModel::point_mass(ProbTriple{0.0, 0.0, 1.0});
    const IdentityReport rep = identity_report(two, 500, 1, 50, 2);
    CHECK(rep.primary.p_escape == 1.0);
    CHECK(rep.primary.mean_first_passage_landing == 2.0);
    CHECK(rep.primary.mean_first_epoch_pos == 2.0);
    CHECK(rep.primary.mean_first_nu_pos == 2.0);
    for (const auto& c : rep.primary.checks) {
        INFO(c.name);
        CHECK(c.pass);
    }
}

TEST_CASE("identity report passes on a right-transient point mass") {
    const EnvModel m = EnvModel::point_mass(ProbTriple{0.2, 0.4, 0.4});
    const IdentityReport rep = identity_report(m, 4000, 99, 60, 0);
    CHECK(rep.primary.discarded == 0);
    for (const auto& c : rep.primary.checks) {
        INFO(c.name, " lhs=", c.lhs, " rhs=", c.rhs, " se=", c.se);
        CHECK(c.pass);
    }
    for (const auto& c : rep.doubled.checks) {
        INFO("doubled ", c.name, " lhs=", c.lhs, " rhs=", c.rhs, " se=", c.se);
        CHECK(c.pass);
    }
    CHECK(rep.primary.first_epoch_tail.pass);
}

TEST_CASE("identity report refuses non-transient models") {
    const EnvModel left = EnvModel::point_mass(ProbTriple{0.8, 0.1, 0.1});
    CHECK_THROWS_AS(identity_report(left, 100, 1, 50), RegimeError);
}
