#ifndef RWRE_RANGE_HPP
#define RWRE_RANGE_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "rwre/env.hpp"
#include "rwre/renewal.hpp"

namespace rwre {

struct RangeStats {
    std::int64_t x_max = 0;
    std::vector<std::pair<std::int64_t, std::int64_t>> n_curve;  // (x, visited count in [0, x])

    // Fraction of sites in [1, x_max] ever visited (site 0 is the start and
    // always visited, so this equals (N(x_max) - 1) / x_max).
    double theta_direct = 0.0;
    double theta_direct_se = 0.0;

    double theta_renewal = 0.0;  // (mean_x - 1) / mean_x from inter-epoch blocks
    double theta_renewal_se = 0.0;
    double theta_renewal_2w = 0.0;
    double theta_renewal_2w_se = 0.0;

    std::int64_t n_visited = 0;          // N(x_max)
    std::int64_t skipped_in_range = 0;   // never-visited sites in [0, x_max]
    std::int64_t skipped_up_to_last_nu = 0;
    std::int64_t n_nu_epochs = 0;        // confirmed double-jump epochs
    bool census_exact = false;           // skipped_up_to_last_nu == n_nu_epochs

    std::int64_t n_blocks = 0;
    double mean_x = 0.0;
    double se_x = 0.0;
    double overshoot1_frac = 0.0;

    std::int64_t steps = 0;
    std::int64_t final_position = 0;
    bool starved = false;  // no confirmed epoch in the whole run
};

// One quenched walk past x_max plus the confirmation margin, counting visited
// sites and regeneration blocks.  theta_direct's SE comes from a bootstrap
// over inter-epoch segments (visits within a segment are dependent; segments
// are the independence unit).
RangeStats range_count(const EnvModel& model, std::uint64_t seed, std::int64_t x_max,
                       std::int64_t confirm_w, std::int64_t cap);

// (mean_x - 1)/mean_x with a delta-method SE.  Requires >= 30 blocks.
std::pair<double, double> theta_renewal(const BlockStats& stats);

struct TailCurve {
    std::vector<std::int64_t> n_grid;
    std::vector<double> survival;  // P(max > n and returned), at confirm_c
    std::vector<double> ci_lo, ci_hi;
    double p_d_finite = 0.0;       // P(returned) at confirm_c
    double p_d_finite_2c = 0.0;    // same verdict at twice the confirmation level
    double fitted_rate = 0.0;
    double fit_r2 = 0.0;
    std::int64_t retained_lo = 0, retained_hi = -1;
    bool fit_ok = false;
    bool degenerate = false;  // no returns observed; no tail to fit
    std::uint64_t replicas = 0;
    std::int64_t confirm_c = 0;
};

// Per replica: a fresh environment and one excursion from 0.  survival(n) is
// the fraction with a return whose maximum exceeded n.
TailCurve tail_estimate(const EnvModel& model, const std::vector<std::int64_t>& n_grid,
                        std::uint64_t replicas, std::int64_t confirm_c, std::uint64_t seed,
                        int threads = 0);

}  // namespace rwre

#endif
