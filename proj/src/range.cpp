#include "rwre/range.hpp"

#include <algorithm>
#include <cmath>

#include "rwre/matrix.hpp"
#include "rwre/parallel.hpp"
#include "rwre/stats.hpp"
#include "rwre/walk.hpp"

namespace rwre {

namespace {

void require_transient_right(const EnvModel& model, std::uint64_t seed, const char* what) {
    if (model.never_steps_left()) return;  // monotone to the right by construction
    const RegimeReport reg = classify(model, derive_seed(seed, 0xC0DE), 200'000);
    if (reg.regime != Regime::transient_right) {
        throw RegimeError(std::string(what) + " requires a right-transient model, classified " +
                          to_string(reg.regime));
    }
}

}  // namespace

RangeStats range_count(const EnvModel& model, std::uint64_t seed, std::int64_t x_max,
                       std::int64_t confirm_w, std::int64_t cap) {
    if (x_max < 1000) throw InvariantViolationError("range run needs x_max >= 1000");
    if (confirm_w < 1) throw InvariantViolationError("confirmation window must be >= 1");
    require_transient_right(model, seed, "range count");

    const std::int64_t horizon = x_max + 2 * confirm_w;
    const std::int64_t left_guard = 512;
    const Environment env =
        realize_window(model, derive_seed(seed, 1), -left_guard, horizon + 2);
    Xoshiro256pp rng(derive_seed(seed, 2));

    std::vector<std::uint8_t> visited(static_cast<std::size_t>(horizon + 3), 0);
    auto mark = [&visited](std::int64_t, std::int64_t pos) {
        if (pos >= 0 && pos < static_cast<std::int64_t>(visited.size())) {
            visited[static_cast<std::size_t>(pos)] = 1;
        }
    };
    RenewalScanner scan_w(confirm_w);
    RenewalScanner scan_2w(2 * confirm_w);

    const WalkSummary summary = run_walk(env, horizon, rng, cap, mark, scan_w, scan_2w);

    RangeStats out;
    out.x_max = x_max;
    out.steps = summary.steps;
    out.final_position = summary.final_position;
    out.starved = scan_w.starved();

    // Visited-site curve over [0, x].
    const std::int64_t stride = std::max<std::int64_t>(1, x_max / 200);
    std::int64_t running = 0;
    for (std::int64_t x = 0; x <= x_max; ++x) {
        running += visited[static_cast<std::size_t>(x)];
        if (x % stride == 0 || x == x_max) out.n_curve.emplace_back(x, running);
    }
    out.n_visited = running;
    out.skipped_in_range = (x_max + 1) - running;
    out.theta_direct = static_cast<double>(out.n_visited - 1) / static_cast<double>(x_max);

    // Census against the double-jump epochs: each one leaves exactly the site
    // below it unvisited, and nothing else in between is skipped.
    std::vector<std::int64_t> nu_positions;
    for (const auto& r : scan_w.records()) {
        if (r.overshoot == 2) nu_positions.push_back(r.position);
    }
    out.n_nu_epochs = static_cast<std::int64_t>(nu_positions.size());
    if (!nu_positions.empty()) {
        const std::int64_t last = nu_positions.back();
        std::int64_t skipped = 0;
        for (std::int64_t x = 0; x <= last; ++x) {
            skipped += visited[static_cast<std::size_t>(x)] ? 0 : 1;
        }
        out.skipped_up_to_last_nu = skipped;
        out.census_exact = skipped == out.n_nu_epochs;
    }

    // Block statistics from the primary window.
    bool warn = false;
    const std::vector<NuBlock> blocks = nu_blocks(scan_w.records(), &warn);
    std::int64_t overshoot1 = 0;
    for (const auto& r : scan_w.records()) overshoot1 += r.overshoot == 1 ? 1 : 0;
    if (!scan_w.records().empty()) {
        out.overshoot1_frac =
            static_cast<double>(overshoot1) / static_cast<double>(scan_w.records().size());
    }
    if (!blocks.empty()) {
        const BlockStats bs = block_stats(blocks);
        out.n_blocks = bs.n_blocks;
        out.mean_x = bs.mean_x;
        out.se_x = bs.se_x;
        if (bs.n_blocks >= 30) {
            const auto [theta, se] = theta_renewal(bs);
            out.theta_renewal = theta;
            out.theta_renewal_se = se;
        }
    }
    bool warn2 = false;
    const std::vector<NuBlock> blocks_2w = nu_blocks(scan_2w.records(), &warn2);
    if (static_cast<std::int64_t>(blocks_2w.size()) >= 30) {
        const auto [theta, se] = theta_renewal(block_stats(blocks_2w));
        out.theta_renewal_2w = theta;
        out.theta_renewal_2w_se = se;
    }

    // Bootstrap SE for theta_direct over the inter-epoch segments that lie
    // inside [0, x_max].  Each segment of length L contributes L - 1 visited
    // sites; the prefix before the first epoch and the stretch after the last
    // in-range epoch are held fixed.
    std::vector<std::int64_t> boot_lens;
    for (const auto& b : blocks) {
        if (b.end_pos <= x_max) boot_lens.push_back(b.x_increment);
    }
    if (!boot_lens.empty()) {
        const std::size_t k = boot_lens.size();
        std::int64_t block_len_total = 0;
        for (std::int64_t len : boot_lens) block_len_total += len;
        const double fixed_visited = static_cast<double>(out.n_visited - 1) -
                                     static_cast<double>(block_len_total -
                                                         static_cast<std::int64_t>(k));
        const double fixed_len = static_cast<double>(x_max - block_len_total);
        Xoshiro256pp boot_rng(derive_seed(seed, 3));
        MeanVar boot;
        constexpr int kResamples = 200;
        for (int b = 0; b < kResamples; ++b) {
            std::int64_t len = 0;
            for (std::size_t i = 0; i < k; ++i) {
                const std::size_t j = static_cast<std::size_t>(
                    boot_rng.uniform01() * static_cast<double>(k));
                len += boot_lens[std::min(j, k - 1)];
            }
            const double vis = fixed_visited + static_cast<double>(len) - static_cast<double>(k);
            boot.add(vis / (fixed_len + static_cast<double>(len)));
        }
        out.theta_direct_se = std::sqrt(boot.variance());
    }
    return out;
}

std::pair<double, double> theta_renewal(const BlockStats& stats) {
    if (stats.n_blocks < 30) {
        throw InsufficientDataError("theta from blocks needs >= 30 blocks, have " +
                                    std::to_string(stats.n_blocks));
    }
    if (stats.mean_x < 2.0) {
        throw InvariantViolationError("mean block increment below 2: malformed blocks");
    }
    const double theta = (stats.mean_x - 1.0) / stats.mean_x;
    const double se = stats.se_x / (stats.mean_x * stats.mean_x);
    return {theta, se};
}

TailCurve tail_estimate(const EnvModel& model, const std::vector<std::int64_t>& n_grid,
                        std::uint64_t replicas, std::int64_t confirm_c, std::uint64_t seed,
                        int threads) {
    if (replicas == 0) throw InsufficientDataError("tail estimation needs replicas >= 1");
    if (n_grid.empty()) throw InvariantViolationError("empty n grid");
    std::int64_t n_max = 0;
    for (std::int64_t n : n_grid) {
        if (n < 0) throw InvariantViolationError("grid entries must be >= 0");
        n_max = std::max(n_max, n);
    }
    if (n_max > confirm_c / 2) {
        throw InvariantViolationError("max grid entry must be at most half the confirmation level");
    }
    require_transient_right(model, seed, "tail estimation");

    // One excursion per replica at twice the confirmation level; the verdict
    // at the requested level follows from (returned, max).
    struct Partial {
        std::vector<std::int64_t> max_hist;  // returned-at-c excursion maxima
        std::uint64_t returned_c = 0;
        std::uint64_t returned_2c = 0;
        std::uint64_t total = 0;

        void merge(const Partial& o) {
            if (max_hist.size() < o.max_hist.size()) max_hist.resize(o.max_hist.size(), 0);
            for (std::size_t i = 0; i < o.max_hist.size(); ++i) max_hist[i] += o.max_hist[i];
            returned_c += o.returned_c;
            returned_2c += o.returned_2c;
            total += o.total;
        }
    };
    Partial init;
    init.max_hist.assign(static_cast<std::size_t>(confirm_c) + 1, 0);

    const std::int64_t cap = 10'000'000;
    Partial sum = parallel_map<Partial>(
        replicas, derive_seed(seed, 7), threads, init,
        [&model, confirm_c, cap](std::uint64_t, std::uint64_t rep_seed) {
            Partial p;
            p.max_hist.assign(static_cast<std::size_t>(confirm_c) + 1, 0);
            p.total = 1;
            // An excursion from 0 only reads sites in [0, 2c): it stops the
            // moment it goes below 0 or reaches 2c.
            Environment env(model, derive_seed(rep_seed, 1), -2, 2 * confirm_c + 2);
            Xoshiro256pp rng(derive_seed(rep_seed, 2));
            const ExcursionOutcome exc = run_excursion(env, 0, rng, 2 * confirm_c, cap);
            if (exc.verdict == ExcursionOutcome::Verdict::returned) {
                p.returned_2c = 1;
                if (exc.max_rise < confirm_c) {
                    p.returned_c = 1;
                    ++p.max_hist[static_cast<std::size_t>(exc.max_rise)];
                }
            }
            return p;
        },
        [](Partial& a, const Partial& b) { a.merge(b); });

    TailCurve out;
    out.n_grid = n_grid;
    out.replicas = replicas;
    out.confirm_c = confirm_c;
    out.p_d_finite = static_cast<double>(sum.returned_c) / static_cast<double>(sum.total);
    out.p_d_finite_2c = static_cast<double>(sum.returned_2c) / static_cast<double>(sum.total);
    out.degenerate = sum.returned_c == 0;

    // exceed[m] = number of returned excursions with max > m
    std::vector<std::int64_t> exceed(sum.max_hist.size() + 1, 0);
    for (std::size_t m = sum.max_hist.size(); m-- > 0;) {
        exceed[m] = exceed[m + 1] + sum.max_hist[m];
    }
    const double total = static_cast<double>(sum.total);
    for (std::int64_t n : n_grid) {
        const std::size_t idx = std::min(static_cast<std::size_t>(n + 1), exceed.size() - 1);
        const double s = static_cast<double>(exceed[idx]) / total;
        out.survival.push_back(s);
        const double se = binomial_se(s, static_cast<std::int64_t>(sum.total));
        out.ci_lo.push_back(std::max(0.0, s - 1.959963984540054 * se));
        out.ci_hi.push_back(std::min(1.0, s + 1.959963984540054 * se));
    }

    if (!out.degenerate) {
        std::vector<std::int64_t> counts;
        counts.reserve(n_grid.size());
        for (std::int64_t n : n_grid) {
            const std::size_t idx = std::min(static_cast<std::size_t>(n + 1), exceed.size() - 1);
            counts.push_back(exceed[idx]);
        }
        const TailFit fit =
            fit_log_survival(n_grid, counts, static_cast<std::int64_t>(sum.total), 25);
        out.fit_ok = fit.ok;
        out.fitted_rate = fit.rate;
        out.fit_r2 = fit.r2;
        out.retained_lo = fit.retained_lo;
        out.retained_hi = fit.retained_hi;
    }
    return out;
}

}  // namespace rwre
