#ifndef RWRE_HITTING_HPP
#define RWRE_HITTING_HPP

#include <cstdint>

#include "rwre/env.hpp"

namespace rwre {

struct HittingResult {
    enum class Method { formula, oracle };
    double log_p = 0.0;  // <= 0
    double p = 0.0;      // exp(log_p); may underflow to 0 for deep windows
    Method method = Method::formula;
};

// Probability that the walk started at 0 enters (-inf, -n) before [1, +inf),
// from the matrix-product sum over the window sites -n..0.  The sum is
// carried in (mantissa, log-scale) form, so the result is finite for any
// depth.  The environment must cover [-n, 0] and every window triple needs
// p_left > 0.
HittingResult hit_left_prob_formula(const Environment& env, std::int64_t n);

// Same probability from the absorption linear system over the transient
// states -n..0 (enter below only at -n-1 since left jumps are unit).  Banded
// Gaussian elimination with adjacent-row partial pivoting.
HittingResult hit_left_prob_oracle(const Environment& env, std::int64_t n);

}  // namespace rwre

#endif
