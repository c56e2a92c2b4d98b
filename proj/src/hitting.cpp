#include "rwre/hitting.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "rwre/matrix.hpp"

namespace rwre {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_add_exp(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    const double hi = std::max(a, b);
    const double lo = std::min(a, b);
    return hi + std::log1p(std::exp(lo - hi));
}

void check_window(const Environment& env, std::int64_t n) {
    if (n < 0) throw InvalidWindowError("window depth must be >= 0");
    if (env.lo() > -n || env.hi() < 0) {
        throw InvalidWindowError("environment window does not cover [-n, 0]");
    }
    for (std::int64_t i = -n; i <= 0; ++i) {
        if (!(env.at(i).left > 0.0)) {
            throw DegenerateEnvironmentError("window site " + std::to_string(i) +
                                             " has p_left = 0");
        }
    }
}

}  // namespace

HittingResult hit_left_prob_formula(const Environment& env, std::int64_t n) {
    check_window(env, n);

    // Backward recursion v <- A_j v from v = A_0 e1^t; the running first
    // component is the j-th summand.  Exponent carried separately.
    const Matrix2 a0 = transfer_matrix(env.at(0));
    double v1 = a0.a11, v2 = a0.a21;
    double v_log_scale = 0.0;
    double log_sum = v1 > 0.0 ? std::log(v1) : kNegInf;

    for (std::int64_t j = -1; j >= -n; --j) {
        const Matrix2 a = transfer_matrix(env.at(j));
        const double w1 = a.a11 * v1 + a.a12 * v2;
        const double w2 = v1;  // bottom row of a transfer matrix is (1, 0)
        v1 = w1;
        v2 = w2;
        const double m = std::max(v1, v2);
        if (m == 0.0) break;  // all later summands vanish
        if (m > 1e250 || m < 1e-250) {
            v1 /= m;
            v2 /= m;
            v_log_scale += std::log(m);
        }
        if (v1 > 0.0) log_sum = log_add_exp(log_sum, v_log_scale + std::log(v1));
    }

    HittingResult out;
    out.method = HittingResult::Method::formula;
    // log p = -log(1 + S) from log S, stable for any magnitude of S.
    if (log_sum == kNegInf) {
        out.log_p = 0.0;
    } else if (log_sum > 0.0) {
        out.log_p = -(log_sum + std::log1p(std::exp(-log_sum)));
    } else {
        out.log_p = -std::log1p(std::exp(log_sum));
    }
    out.p = std::exp(out.log_p);
    return out;
}

HittingResult hit_left_prob_oracle(const Environment& env, std::int64_t n) {
    check_window(env, n);
    if (n > 10'000) throw InvalidWindowError("oracle limited to window depth 10^4");

    // Unknowns h(-n)..h(0) at rows 0..n; row r holds columns r-1..r+3
    // (the extra slot absorbs pivoting fill-in).
    const std::size_t m = static_cast<std::size_t>(n) + 1;
    std::vector<std::array<double, 5>> rows(m, {0, 0, 0, 0, 0});
    std::vector<double> b(m, 0.0);
    for (std::size_t r = 0; r < m; ++r) {
        const ProbTriple& w = env.at(static_cast<std::int64_t>(r) - n);
        if (r > 0) rows[r][0] = -w.left;
        rows[r][1] = 1.0;
        if (r + 1 < m) rows[r][2] = -w.one;
        if (r + 2 < m) rows[r][3] = -w.two;
        if (r == 0) b[r] = w.left;
    }

    for (std::size_t r = 0; r + 1 < m; ++r) {
        if (std::fabs(rows[r + 1][0]) > std::fabs(rows[r][1])) {
            // Adjacent-row swap; storage windows differ by one column.
            std::array<double, 5> upper{};
            for (int c = 1; c < 5; ++c) upper[c] = rows[r + 1][c - 1];
            std::array<double, 5> lower{};
            for (int c = 0; c < 4; ++c) lower[c] = rows[r][c + 1];
            rows[r] = upper;
            rows[r + 1] = lower;
            std::swap(b[r], b[r + 1]);
        }
        if (std::fabs(rows[r][1]) < 1e-300) {
            throw InternalError("vanishing pivot in the absorption solve");
        }
        const double factor = rows[r + 1][0] / rows[r][1];
        rows[r + 1][0] = 0.0;
        for (int j = 1; j < 4; ++j) rows[r + 1][j] -= factor * rows[r][j + 1];
        b[r + 1] -= factor * b[r];
    }

    std::vector<double> h(m, 0.0);
    for (std::size_t rr = m; rr-- > 0;) {
        double acc = b[rr];
        for (int c = 2; c < 5; ++c) {
            const std::size_t col = rr + static_cast<std::size_t>(c) - 1;
            if (col < m) acc -= rows[rr][c] * h[col];
        }
        if (std::fabs(rows[rr][1]) < 1e-300) {
            throw InternalError("vanishing pivot in the absorption solve");
        }
        h[rr] = acc / rows[rr][1];
    }

    HittingResult out;
    out.method = HittingResult::Method::oracle;
    out.p = std::clamp(h[m - 1], 0.0, 1.0);
    out.log_p = out.p > 0.0 ? std::log(out.p) : kNegInf;
    return out;
}

}  // namespace rwre
