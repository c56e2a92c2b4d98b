#ifndef RWRE_RENEWAL_HPP
#define RWRE_RENEWAL_HPP

#include <cstdint>
#include <deque>
#include <string>
#include <vector>

#include "rwre/env.hpp"

namespace rwre {

struct RenewalRecord {
    std::int64_t time = 0;
    std::int64_t position = 0;
    int overshoot = 0;  // position minus the running maximum before this time
    bool confirmed = true;
};

// Online regeneration detector.  A time t is an epoch when X_t strictly
// exceeds every earlier position and the walk never goes below X_t
// afterwards; "never" is certified once the walk reaches X_t + W without a
// dip.  Candidates whose level the walk later undercuts are discarded;
// candidates still pending at the end of the stream are withheld.
//
// Pending candidates are held in a deque ordered by level.  A dip kills the
// back, a confirmation pops the front; levels pending at once span less than
// W, so memory stays bounded by the confirmation window.
class RenewalScanner {
  public:
    explicit RenewalScanner(std::int64_t confirm_w);

    void operator()(std::int64_t time, std::int64_t position) {
        if (!started_) {
            started_ = true;
            max_seen_ = position;
            return;
        }
        while (!pending_.empty() && pending_.back().position > position) pending_.pop_back();
        if (position > max_seen_) {
            pending_.push_back(RenewalRecord{time, position,
                                             static_cast<int>(position - max_seen_), true});
            max_seen_ = position;
        }
        while (!pending_.empty() && position >= pending_.front().position + confirm_w_) {
            records_.push_back(pending_.front());
            pending_.pop_front();
        }
    }

    const std::vector<RenewalRecord>& records() const { return records_; }
    std::int64_t pending_count() const { return static_cast<std::int64_t>(pending_.size()); }
    bool starved() const { return records_.empty(); }
    std::int64_t confirm_window() const { return confirm_w_; }

  private:
    std::int64_t confirm_w_;
    bool started_ = false;
    std::int64_t max_seen_ = 0;
    std::deque<RenewalRecord> pending_;
    std::vector<RenewalRecord> records_;
};

// Convenience scan of a stored path (positions at times 0..size-1).
std::vector<RenewalRecord> renewal_scan(const std::vector<std::int64_t>& path,
                                        std::int64_t confirm_w);

struct NuBlock {
    std::int64_t start_pos = 0;
    std::int64_t end_pos = 0;
    std::int64_t x_increment = 0;  // end_pos - start_pos, always >= 2
    std::int64_t t_increment = 0;
    std::int64_t skipped_site = 0;  // end_pos - 1, never visited by the walk
};

// Pairs consecutive overshoot-2 epochs.  The stretch before the first such
// epoch has a different law and is never part of a block.
std::vector<NuBlock> nu_blocks(const std::vector<RenewalRecord>& records, bool* warn = nullptr);

struct BlockStats {
    std::int64_t n_blocks = 0;
    double mean_x = 0.0;
    double se_x = 0.0;
    double mean_overshoot1_frac = -1.0;  // filled by callers that hold the record stream
};

BlockStats block_stats(const std::vector<NuBlock>& blocks);

// One lhs-vs-rhs consistency check with a Monte Carlo tolerance.
struct IdentityCheck {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    double se = 0.0;       // combined standard error of lhs - rhs
    bool pass = false;     // |lhs - rhs| <= 3 se (or lhs <= rhs + 3 se for bounds)
    bool is_bound = false;
};

struct TailSlope {
    double rate = 0.0;  // decay rate of the log-tail, > 0 when pass
    double r2 = 0.0;
    std::int64_t retained_lo = 0, retained_hi = -1;
    bool pass = false;
};

// Everything measured at one confirmation window.
struct IdentityNumbers {
    std::int64_t confirm = 0;
    std::vector<IdentityCheck> checks;
    TailSlope first_epoch_tail;
    // component diagnostics
    double mean_first_passage_landing = 0.0;  // E[X at first passage over 0]
    double mean_m_plus_xi_returned = 0.0;     // E[(max + overshoot); returned]
    double p_escape = 0.0;                    // P(never below start)
    double mean_first_epoch_pos = 0.0;
    double mean_first_nu_pos = 0.0;
    std::int64_t discarded = 0;  // replicas dropped for starvation/truncation
};

struct IdentityReport {
    std::uint64_t replicas_per_group = 0;
    IdentityNumbers primary;  // at the requested window
    IdentityNumbers doubled;  // at twice the window, to expose censoring bias
};

// Monte Carlo verification of the renewal identities: the first-epoch mean
// decomposition, the first-double-jump-epoch mean decomposition, the
// geometric law of successive passage events, the bound on failed-attempt
// probabilities, and the exponential tail of the first epoch position.
// Each side of each check is estimated from its own replica group.
IdentityReport identity_report(const EnvModel& model, std::uint64_t replicas, std::uint64_t seed,
                               std::int64_t confirm, int threads = 0);

}  // namespace rwre

#endif
