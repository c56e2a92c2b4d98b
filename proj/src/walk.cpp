#include "rwre/walk.hpp"

namespace rwre {

ExcursionOutcome run_excursion(const Environment& env, std::int64_t start, Xoshiro256pp& rng,
                               std::int64_t confirm_c, std::int64_t cap) {
    if (confirm_c < 1) throw InvariantViolationError("confirmation level must be >= 1");
    ExcursionOutcome out;
    out.confirm_level = confirm_c;
    std::int64_t pos = start;
    std::int64_t max_rise = 0;
    for (std::int64_t t = 1; t <= cap; ++t) {
        pos += step(env.at(pos), rng);
        if (pos - start > max_rise) max_rise = pos - start;
        if (pos < start) {
            out.verdict = ExcursionOutcome::Verdict::returned;
            out.d_time = t;
            out.max_rise = max_rise;
            out.steps_used = t;
            return out;
        }
        if (pos >= start + confirm_c) {
            out.verdict = ExcursionOutcome::Verdict::escaped;
            out.steps_used = t;
            return out;
        }
    }
    throw TruncationError("excursion undecided after cap steps", cap);
}

ExcursionOutcome run_excursion_with_xi(LazyEnvironment& env, std::int64_t start,
                                       Xoshiro256pp& rng, std::int64_t confirm_c,
                                       std::int64_t cap) {
    if (confirm_c < 1) throw InvariantViolationError("confirmation level must be >= 1");
    ExcursionOutcome out;
    out.confirm_level = confirm_c;
    std::int64_t pos = start;
    std::int64_t max_rise = 0;
    std::int64_t t = 0;
    while (t < cap) {
        pos += step(env.at(pos), rng);
        ++t;
        if (pos - start > max_rise) max_rise = pos - start;
        if (pos < start) {
            out.verdict = ExcursionOutcome::Verdict::returned;
            out.d_time = t;
            out.max_rise = max_rise;
            // keep walking to the first passage above the excursion maximum
            const std::int64_t target = start + max_rise;
            while (t < cap) {
                pos += step(env.at(pos), rng);
                ++t;
                if (pos > target) {
                    out.xi = static_cast<int>(pos - target);
                    out.steps_used = t;
                    return out;
                }
            }
            throw TruncationError("overshoot re-passage undecided after cap steps", cap);
        }
        if (pos >= start + confirm_c) {
            out.verdict = ExcursionOutcome::Verdict::escaped;
            out.steps_used = t;
            return out;
        }
    }
    throw TruncationError("excursion undecided after cap steps", cap);
}

FirstPassage first_passage(const Environment& env, std::int64_t level, std::int64_t start,
                           Xoshiro256pp& rng, std::int64_t cap) {
    if (start > level) throw InvariantViolationError("first passage requires start <= level");
    std::int64_t pos = start;
    for (std::int64_t t = 1; t <= cap; ++t) {
        pos += step(env.at(pos), rng);
        if (pos > level) {
            return FirstPassage{level, t, pos, static_cast<int>(pos - level)};
        }
    }
    throw TruncationError("first passage not reached within cap steps", cap);
}

}  // namespace rwre
