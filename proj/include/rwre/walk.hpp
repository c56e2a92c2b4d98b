#ifndef RWRE_WALK_HPP
#define RWRE_WALK_HPP

#include <cstdint>

#include "rwre/env.hpp"
#include "rwre/rng.hpp"

namespace rwre {

// Inverse-CDF jump draw with the fixed component order (-1, +1, +2), so a
// recorded uniform replays to the same jump on any platform.
inline int sample_step(const ProbTriple& t, double u) {
    if (u < t.left) return -1;
    if (u < t.left + t.one) return +1;
    return +2;
}

inline int step(const ProbTriple& t, Xoshiro256pp& rng) {
    return sample_step(t, rng.uniform01());
}

struct ExcursionOutcome {
    enum class Verdict { returned, escaped };
    Verdict verdict = Verdict::escaped;
    std::int64_t d_time = -1;    // step at which the walk first went below start
    std::int64_t max_rise = 0;   // highest point minus start over steps 0..d_time
    int xi = 0;                  // overshoot over max_rise at the later re-passage; 0 = not measured
    std::int64_t steps_used = 0;
    std::int64_t confirm_level = 0;
};

// Runs from start until position < start (returned) or position >= start +
// confirm_c (escaped).  Throws TruncationError after cap steps.
ExcursionOutcome run_excursion(const Environment& env, std::int64_t start, Xoshiro256pp& rng,
                               std::int64_t confirm_c, std::int64_t cap);

// Same, and on a return keeps walking until the position exceeds the
// excursion maximum, recording the overshoot as xi.  Grows the window as
// needed.
ExcursionOutcome run_excursion_with_xi(LazyEnvironment& env, std::int64_t start,
                                       Xoshiro256pp& rng, std::int64_t confirm_c,
                                       std::int64_t cap);

struct FirstPassage {
    std::int64_t level = 0;
    std::int64_t time = 0;     // first step with position > level
    std::int64_t landing = 0;  // position at that step
    int overshoot = 0;         // landing - level, in {1, 2}
};

FirstPassage first_passage(const Environment& env, std::int64_t level, std::int64_t start,
                           Xoshiro256pp& rng, std::int64_t cap);

struct WalkSummary {
    std::int64_t steps = 0;
    std::int64_t final_position = 0;
};

// Streams (time, position) to each observer -- once for the initial state at
// time 0 and once per step -- until position > horizon_site.  Trajectories
// are never stored; observers accumulate whatever they need.
template <class... Obs>
WalkSummary run_walk(const Environment& env, std::int64_t horizon_site, Xoshiro256pp& rng,
                     std::int64_t cap, Obs&&... obs) {
    std::int64_t pos = 0;
    std::int64_t t = 0;
    (obs(t, pos), ...);
    while (pos <= horizon_site) {
        if (t >= cap) {
            throw TruncationError("walk cap exhausted before horizon " +
                                      std::to_string(horizon_site),
                                  t);
        }
        pos += step(env.at(pos), rng);
        ++t;
        (obs(t, pos), ...);
    }
    return WalkSummary{t, pos};
}

}  // namespace rwre

#endif
