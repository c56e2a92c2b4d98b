#include "rwre/renewal.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "rwre/matrix.hpp"
#include "rwre/parallel.hpp"
#include "rwre/stats.hpp"
#include "rwre/walk.hpp"

namespace rwre {

RenewalScanner::RenewalScanner(std::int64_t confirm_w) : confirm_w_(confirm_w) {
    if (confirm_w < 1) throw InvariantViolationError("confirmation window must be >= 1");
}

std::vector<RenewalRecord> renewal_scan(const std::vector<std::int64_t>& path,
                                        std::int64_t confirm_w) {
    RenewalScanner scanner(confirm_w);
    for (std::size_t t = 0; t < path.size(); ++t) {
        scanner(static_cast<std::int64_t>(t), path[t]);
    }
    return scanner.records();
}

std::vector<NuBlock> nu_blocks(const std::vector<RenewalRecord>& records, bool* warn) {
    std::vector<NuBlock> out;
    bool have_prev = false;
    RenewalRecord prev;
    for (const auto& r : records) {
        if (r.overshoot != 2) continue;
        if (have_prev) {
            out.push_back(NuBlock{prev.position, r.position, r.position - prev.position,
                                  r.time - prev.time, r.position - 1});
        }
        prev = r;
        have_prev = true;
    }
    if (warn) *warn = out.empty();
    return out;
}

BlockStats block_stats(const std::vector<NuBlock>& blocks) {
    if (blocks.empty()) throw InsufficientDataError("no complete inter-epoch blocks");
    MeanVar x;
    for (const auto& b : blocks) x.add(static_cast<double>(b.x_increment));
    BlockStats s;
    s.n_blocks = x.n;
    s.mean_x = x.mean;
    s.se_x = x.se();
    return s;
}

namespace {

// Single-candidate bookkeeping for the successive passage attempts: a
// candidate is created at each strict record while no candidate is pending,
// dies when the walk goes below its level, and the attempt count at the
// first confirmation is the number of passages needed.
struct AttemptCounter {
    std::int64_t confirm_w;
    bool started = false;
    bool done = false;
    bool cand_active = false;
    std::int64_t max_seen = 0;
    std::int64_t cand_level = 0;
    int cand_overshoot = 0;
    int attempts = 0;            // K: index of the confirmed attempt
    std::int64_t epoch_pos = 0;  // position of the first regeneration epoch
    std::int64_t epoch_time = 0;
    int epoch_overshoot = 0;

    void feed(std::int64_t t, std::int64_t pos) {
        if (!started) {
            started = true;
            max_seen = pos;
            return;
        }
        if (done) return;
        if (cand_active) {
            if (pos < cand_level) {
                cand_active = false;
            } else if (pos >= cand_level + confirm_w) {
                done = true;
                epoch_pos = cand_level;
                epoch_overshoot = cand_overshoot;
                return;
            }
        }
        if (!cand_active && pos > max_seen) {
            ++attempts;
            cand_active = true;
            cand_level = pos;
            cand_overshoot = static_cast<int>(pos - max_seen);
            epoch_time = t;
        }
        if (pos > max_seen) max_seen = pos;
    }
};

struct ScanOutcome {
    bool ok = false;
    bool dipped = false;  // went below the start at some observed time
    std::int64_t s1_landing = 0;
    struct PerWindow {
        std::int64_t tau1_pos = 0;
        int tau1_overshoot = 0;
        int attempts = 0;
        std::int64_t nu1_pos = 0;
    } w, w2;
};

// One replica: walk from 0 until the first double-jump epoch is confirmed at
// both window sizes (or the cap is hit).
ScanOutcome scan_replica(const EnvModel& model, std::uint64_t replica_seed, std::int64_t confirm,
                         std::int64_t cap) {
    LazyEnvironment env(model, derive_seed(replica_seed, 1), -64,
                        std::max<std::int64_t>(4 * confirm + 64, 512));
    Xoshiro256pp rng(derive_seed(replica_seed, 2));

    RenewalScanner scan_w(confirm), scan_w2(2 * confirm);
    AttemptCounter k_w{confirm}, k_w2{2 * confirm};

    std::int64_t pos = 0, t = 0, min_pos = 0;
    std::int64_t s1_landing = 0;
    scan_w(t, pos);
    scan_w2(t, pos);
    k_w.feed(t, pos);
    k_w2.feed(t, pos);

    std::int64_t nu_w = -1, nu_w2 = -1;
    std::size_t seen_w = 0, seen_w2 = 0;
    const auto poll_nu = [](const RenewalScanner& s, std::size_t& seen, std::int64_t& nu) {
        const auto& rec = s.records();
        for (; seen < rec.size(); ++seen) {
            if (nu < 0 && rec[seen].overshoot == 2) nu = rec[seen].position;
        }
    };

    ScanOutcome out;
    while (t < cap) {
        pos += step(env.at(pos), rng);
        ++t;
        min_pos = std::min(min_pos, pos);
        if (s1_landing == 0 && pos > 0) s1_landing = pos;
        scan_w(t, pos);
        scan_w2(t, pos);
        k_w.feed(t, pos);
        k_w2.feed(t, pos);
        poll_nu(scan_w, seen_w, nu_w);
        poll_nu(scan_w2, seen_w2, nu_w2);
        if (nu_w >= 0 && nu_w2 >= 0) {
            out.ok = true;
            out.dipped = min_pos < 0;
            out.s1_landing = s1_landing;
            out.w.tau1_pos = scan_w.records().front().position;
            out.w.tau1_overshoot = scan_w.records().front().overshoot;
            out.w.attempts = k_w.attempts;
            out.w.nu1_pos = nu_w;
            out.w2.tau1_pos = scan_w2.records().front().position;
            out.w2.tau1_overshoot = scan_w2.records().front().overshoot;
            out.w2.attempts = k_w2.attempts;
            out.w2.nu1_pos = nu_w2;
            if (k_w.epoch_pos != out.w.tau1_pos || k_w.epoch_overshoot != out.w.tau1_overshoot) {
                throw InternalError("attempt counter and scanner disagree on the first epoch");
            }
            return out;
        }
    }
    return out;  // undecided within cap: discarded
}

constexpr std::size_t kTau1HistSize = 1024;

struct EpochPartial {
    struct PerWindow {
        MeanVar tau1_pos;
        MeanVar nu1_pos;
        std::array<std::uint64_t, 6> k_ge{};  // counts of attempts >= k, slots 2..5 used
        std::vector<std::uint64_t> hist = std::vector<std::uint64_t>(kTau1HistSize, 0);

        void add(const ScanOutcome::PerWindow& s) {
            tau1_pos.add(static_cast<double>(s.tau1_pos));
            nu1_pos.add(static_cast<double>(s.nu1_pos));
            for (int k = 2; k <= 5; ++k) {
                if (s.attempts >= k) ++k_ge[static_cast<std::size_t>(k)];
            }
            const std::size_t bin = std::min<std::size_t>(
                static_cast<std::size_t>(s.tau1_pos), kTau1HistSize - 1);
            ++hist[bin];
        }

        void merge(const PerWindow& o) {
            tau1_pos.merge(o.tau1_pos);
            nu1_pos.merge(o.nu1_pos);
            for (std::size_t k = 0; k < k_ge.size(); ++k) k_ge[k] += o.k_ge[k];
            for (std::size_t i = 0; i < hist.size(); ++i) hist[i] += o.hist[i];
        }
    } w, w2;
    std::uint64_t discarded = 0;

    void merge(const EpochPartial& o) {
        w.merge(o.w);
        w2.merge(o.w2);
        discarded += o.discarded;
    }
};

struct PairPartial {
    MeanCov w, w2;
    std::uint64_t discarded = 0;
    std::uint64_t seen = 0;

    void merge(const PairPartial& o) {
        w.merge(o.w);
        w2.merge(o.w2);
        discarded += o.discarded;
        seen += o.seen;
    }
};

struct ExcursionPartial {
    MeanCov zc_c, zc_2c;  // x: (max + overshoot) on returns, y: escape indicator
    std::uint64_t discarded = 0;

    void merge(const ExcursionPartial& o) {
        zc_c.merge(o.zc_c);
        zc_2c.merge(o.zc_2c);
        discarded += o.discarded;
    }
};

double ratio_variance(const MeanCov& mc) {
    // Var of mean_x / mean_y by the delta method, covariance included.
    const double z = mc.mean_x, e = mc.mean_y;
    if (!(e > 0.0)) return std::numeric_limits<double>::infinity();
    return mc.var_mean_x() / (e * e) + (z * z) / (e * e * e * e) * mc.var_mean_y() -
           2.0 * z / (e * e * e) * mc.cov_means();
}

IdentityCheck make_check(std::string name, double lhs, double rhs, double var_lhs,
                         double var_rhs, bool is_bound = false) {
    IdentityCheck c;
    c.name = std::move(name);
    c.lhs = lhs;
    c.rhs = rhs;
    c.se = std::sqrt(std::max(var_lhs + var_rhs, 0.0));
    c.is_bound = is_bound;
    c.pass = is_bound ? lhs <= rhs + 3.0 * c.se : std::fabs(lhs - rhs) <= 3.0 * c.se;
    return c;
}

IdentityNumbers assemble(std::int64_t confirm, const EpochPartial::PerWindow& a,
                         const MeanVar& s1, const MeanCov& exc, const MeanCov& uncond,
                         const MeanCov& cond, std::uint64_t discarded) {
    IdentityNumbers out;
    out.confirm = confirm;
    out.discarded = static_cast<std::int64_t>(discarded);
    out.mean_first_passage_landing = s1.mean;
    out.mean_m_plus_xi_returned = exc.mean_x;
    out.p_escape = exc.mean_y;
    out.mean_first_epoch_pos = a.tau1_pos.mean;
    out.mean_first_nu_pos = a.nu1_pos.mean;

    // E[first epoch position] = E[first passage landing]
    //                         + E[(max + overshoot); returned] / P(never returns)
    {
        const double lhs = a.tau1_pos.mean;
        const double var_lhs = a.tau1_pos.se() * a.tau1_pos.se();
        const double rhs = s1.mean + (exc.mean_y > 0.0 ? exc.mean_x / exc.mean_y
                                                       : std::numeric_limits<double>::infinity());
        const double var_rhs = s1.se() * s1.se() + ratio_variance(exc);
        out.checks.push_back(
            make_check("first_epoch_mean_decomposition", lhs, rhs, var_lhs, var_rhs));
    }

    // E[first double-jump epoch position] = E[first epoch position]
    //   + P(first overshoot = 1) * E[first epoch | no return] / P(first overshoot = 2 | no return)
    {
        const double lhs = a.nu1_pos.mean;
        const double var_lhs = a.nu1_pos.se() * a.nu1_pos.se();
        const double ea = uncond.mean_x, pb = uncond.mean_y;
        const double ec = cond.mean_x, pd = cond.mean_y;
        double rhs, var_rhs;
        if (pb == 0.0) {
            rhs = ea;
            var_rhs = uncond.var_mean_x();
        } else if (pd > 0.0) {
            rhs = ea + pb * ec / pd;
            const double dc = pb / pd;
            const double dd = -pb * ec / (pd * pd);
            var_rhs = uncond.var_mean_x() + (ec / pd) * (ec / pd) * uncond.var_mean_y() +
                      2.0 * (ec / pd) * uncond.cov_means() + dc * dc * cond.var_mean_x() +
                      dd * dd * cond.var_mean_y() + 2.0 * dc * dd * cond.cov_means();
        } else {
            rhs = std::numeric_limits<double>::quiet_NaN();
            var_rhs = std::numeric_limits<double>::infinity();
        }
        out.checks.push_back(
            make_check("first_double_jump_epoch_mean", lhs, rhs, var_lhs, var_rhs));
    }

    // P(attempt k happens) = P(return)^(k-1); the k-th failed-attempt
    // probability is bounded by P(return)^k.
    const double q = 1.0 - exc.mean_y;  // P(return below start)
    const double var_q = exc.var_mean_y();
    const double n_scan = static_cast<double>(a.tau1_pos.n);
    for (int k = 2; k <= 4; ++k) {
        const double p_k = n_scan > 0.0
                               ? static_cast<double>(a.k_ge[static_cast<std::size_t>(k)]) / n_scan
                               : 0.0;
        const double se_p = binomial_se(p_k, a.tau1_pos.n);
        const double rhs = std::pow(q, k - 1);
        const double drhs = static_cast<double>(k - 1) * std::pow(q, k - 2);
        out.checks.push_back(make_check("passage_prob_power_k" + std::to_string(k), p_k, rhs,
                                        se_p * se_p, drhs * drhs * var_q));
    }
    for (int k = 2; k <= 4; ++k) {
        const double r_k =
            n_scan > 0.0
                ? static_cast<double>(a.k_ge[static_cast<std::size_t>(k + 1)]) / n_scan
                : 0.0;
        const double se_r = binomial_se(r_k, a.tau1_pos.n);
        const double rhs = std::pow(q, k);
        const double drhs = static_cast<double>(k) * std::pow(q, k - 1);
        out.checks.push_back(make_check("failed_attempt_bound_k" + std::to_string(k), r_k, rhs,
                                        se_r * se_r, drhs * drhs * var_q, /*is_bound=*/true));
    }

    // Log-tail of the first epoch position must decay linearly.
    {
        std::vector<std::int64_t> xs, exceed;
        std::int64_t above = 0;
        for (std::size_t i = kTau1HistSize; i-- > 0;) {
            above += static_cast<std::int64_t>(a.hist[i]);
            // exceed count for threshold x = i-1 is the tail from bin i up
            if (i >= 1) {
                xs.push_back(static_cast<std::int64_t>(i) - 1);
                exceed.push_back(above);
            }
        }
        std::reverse(xs.begin(), xs.end());
        std::reverse(exceed.begin(), exceed.end());
        const TailFit fit = fit_log_survival(xs, exceed, a.tau1_pos.n, 25);
        out.first_epoch_tail.rate = fit.rate;
        out.first_epoch_tail.r2 = fit.r2;
        out.first_epoch_tail.retained_lo = fit.retained_lo;
        out.first_epoch_tail.retained_hi = fit.retained_hi;
        out.first_epoch_tail.pass = fit.ok && fit.rate > 0.0 && fit.r2 >= 0.9;
    }
    return out;
}

}  // namespace

IdentityReport identity_report(const EnvModel& model, std::uint64_t replicas, std::uint64_t seed,
                               std::int64_t confirm, int threads) {
    if (replicas == 0) throw InsufficientDataError("identity report needs replicas >= 1");
    if (!model.never_steps_left()) {
        const RegimeReport reg = classify(model, derive_seed(seed, 0xC0DE), 200'000);
        if (reg.regime != Regime::transient_right) {
            throw RegimeError("identity report requires a right-transient model, classified " +
                              to_string(reg.regime));
        }
    }
    constexpr std::int64_t kCap = 10'000'000;

    const auto scan_worker_for = [&](bool conditional) {
        return [&model, confirm, conditional](std::uint64_t, std::uint64_t rep_seed) {
            PairPartial p;
            const ScanOutcome s = scan_replica(model, rep_seed, confirm, kCap);
            if (!s.ok) {
                p.discarded = 1;
                return p;
            }
            p.seen = 1;
            if (conditional) {
                if (!s.dipped) {
                    p.w.add(static_cast<double>(s.w.tau1_pos), s.w.tau1_overshoot == 2 ? 1.0 : 0.0);
                    p.w2.add(static_cast<double>(s.w2.tau1_pos),
                             s.w2.tau1_overshoot == 2 ? 1.0 : 0.0);
                }
            } else {
                p.w.add(static_cast<double>(s.w.tau1_pos), s.w.tau1_overshoot == 1 ? 1.0 : 0.0);
                p.w2.add(static_cast<double>(s.w2.tau1_pos), s.w2.tau1_overshoot == 1 ? 1.0 : 0.0);
            }
            return p;
        };
    };

    // Group A: joint law of the first epoch and first double-jump epoch.
    EpochPartial group_a = parallel_map<EpochPartial>(
        replicas, derive_seed(seed, 101), threads, EpochPartial{},
        [&model, confirm](std::uint64_t, std::uint64_t rep_seed) {
            EpochPartial p;
            const ScanOutcome s = scan_replica(model, rep_seed, confirm, kCap);
            if (!s.ok) {
                p.discarded = 1;
                return p;
            }
            p.w.add(s.w);
            p.w2.add(s.w2);
            return p;
        },
        [](EpochPartial& a, const EpochPartial& b) { a.merge(b); });

    // Group B: landing of the first passage over the start.
    struct BPartial {
        MeanVar landing;
        std::uint64_t discarded = 0;
        void merge(const BPartial& o) {
            landing.merge(o.landing);
            discarded += o.discarded;
        }
    };
    BPartial group_b = parallel_map<BPartial>(
        replicas, derive_seed(seed, 102), threads, BPartial{},
        [&model](std::uint64_t, std::uint64_t rep_seed) {
            BPartial p;
            LazyEnvironment env(model, derive_seed(rep_seed, 1), -64, 64);
            Xoshiro256pp rng(derive_seed(rep_seed, 2));
            std::int64_t pos = 0;
            for (std::int64_t t = 0; t < kCap; ++t) {
                pos += step(env.at(pos), rng);
                if (pos > 0) {
                    p.landing.add(static_cast<double>(pos));
                    return p;
                }
            }
            p.discarded = 1;
            return p;
        },
        [](BPartial& a, const BPartial& b) { a.merge(b); });

    // Group C/E: fresh excursions measuring (max + overshoot; returned) and
    // the escape probability, jointly so the ratio's covariance is known.
    ExcursionPartial group_ce = parallel_map<ExcursionPartial>(
        replicas, derive_seed(seed, 103), threads, ExcursionPartial{},
        [&model, confirm](std::uint64_t, std::uint64_t rep_seed) {
            ExcursionPartial p;
            LazyEnvironment env(model, derive_seed(rep_seed, 1), -64,
                                std::max<std::int64_t>(2 * confirm + 64, 512));
            Xoshiro256pp rng(derive_seed(rep_seed, 2));
            ExcursionOutcome exc;
            try {
                exc = run_excursion_with_xi(env, 0, rng, 2 * confirm, kCap);
            } catch (const TruncationError&) {
                p.discarded = 1;
                return p;
            }
            const bool returned_2c = exc.verdict == ExcursionOutcome::Verdict::returned;
            const double z2 = returned_2c ? static_cast<double>(exc.max_rise + exc.xi) : 0.0;
            p.zc_2c.add(z2, returned_2c ? 0.0 : 1.0);
            const bool returned_c = returned_2c && exc.max_rise < confirm;
            const double zc = returned_c ? static_cast<double>(exc.max_rise + exc.xi) : 0.0;
            p.zc_c.add(zc, returned_c ? 0.0 : 1.0);
            return p;
        },
        [](ExcursionPartial& a, const ExcursionPartial& b) { a.merge(b); });

    // Group D: unconditional (first epoch position, overshoot-1 indicator).
    PairPartial group_d =
        parallel_map<PairPartial>(replicas, derive_seed(seed, 104), threads, PairPartial{},
                                  scan_worker_for(false),
                                  [](PairPartial& a, const PairPartial& b) { a.merge(b); });

    // Group F: same pair conditional on never going below the start.
    PairPartial group_f =
        parallel_map<PairPartial>(replicas, derive_seed(seed, 105), threads, PairPartial{},
                                  scan_worker_for(true),
                                  [](PairPartial& a, const PairPartial& b) { a.merge(b); });

    IdentityReport rep;
    rep.replicas_per_group = replicas;
    const std::uint64_t discarded = group_a.discarded + group_d.discarded + group_f.discarded +
                                    group_ce.discarded + group_b.discarded;
    rep.primary = assemble(confirm, group_a.w, group_b.landing, group_ce.zc_c, group_d.w,
                           group_f.w, discarded);
    rep.doubled = assemble(2 * confirm, group_a.w2, group_b.landing, group_ce.zc_2c, group_d.w2,
                           group_f.w2, discarded);
    return rep;
}

}  // namespace rwre
