#ifndef RWRE_STATS_HPP
#define RWRE_STATS_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

namespace rwre {

// Streaming mean/variance (Welford) with an order-stable merge.
struct MeanVar {
    std::int64_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) {
        ++n;
        const double d = x - mean;
        mean += d / static_cast<double>(n);
        m2 += d * (x - mean);
    }

    void merge(const MeanVar& o) {
        if (o.n == 0) return;
        if (n == 0) {
            *this = o;
            return;
        }
        const double d = o.mean - mean;
        const std::int64_t tot = n + o.n;
        mean += d * static_cast<double>(o.n) / static_cast<double>(tot);
        m2 += o.m2 + d * d * static_cast<double>(n) * static_cast<double>(o.n) /
                         static_cast<double>(tot);
        n = tot;
    }

    double variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }
    double se() const { return n > 0 ? std::sqrt(variance() / static_cast<double>(n)) : 0.0; }
};

// Joint accumulator for two series; exposes Cov(mean_x, mean_y) = cxy/(n(n-1)).
struct MeanCov {
    std::int64_t n = 0;
    double mean_x = 0.0, mean_y = 0.0;
    double m2x = 0.0, m2y = 0.0, cxy = 0.0;

    void add(double x, double y) {
        ++n;
        const double dx = x - mean_x;
        mean_x += dx / static_cast<double>(n);
        const double dy = y - mean_y;
        mean_y += dy / static_cast<double>(n);
        m2x += dx * (x - mean_x);
        m2y += dy * (y - mean_y);
        cxy += dx * (y - mean_y);
    }

    void merge(const MeanCov& o) {
        if (o.n == 0) return;
        if (n == 0) {
            *this = o;
            return;
        }
        const std::int64_t tot = n + o.n;
        const double dx = o.mean_x - mean_x;
        const double dy = o.mean_y - mean_y;
        const double w = static_cast<double>(n) * static_cast<double>(o.n) /
                         static_cast<double>(tot);
        m2x += o.m2x + dx * dx * w;
        m2y += o.m2y + dy * dy * w;
        cxy += o.cxy + dx * dy * w;
        mean_x += dx * static_cast<double>(o.n) / static_cast<double>(tot);
        mean_y += dy * static_cast<double>(o.n) / static_cast<double>(tot);
        n = tot;
    }

    double var_x() const { return n > 1 ? m2x / static_cast<double>(n - 1) : 0.0; }
    double var_y() const { return n > 1 ? m2y / static_cast<double>(n - 1) : 0.0; }
    double cov() const { return n > 1 ? cxy / static_cast<double>(n - 1) : 0.0; }
    // Variances/covariance OF THE SAMPLE MEANS.
    double var_mean_x() const { return n > 0 ? var_x() / static_cast<double>(n) : 0.0; }
    double var_mean_y() const { return n > 0 ? var_y() / static_cast<double>(n) : 0.0; }
    double cov_means() const { return n > 0 ? cov() / static_cast<double>(n) : 0.0; }
};

inline double binomial_se(double p_hat, std::int64_t n) {
    if (n <= 0) return 0.0;
    return std::sqrt(std::max(p_hat * (1.0 - p_hat), 0.0) / static_cast<double>(n));
}

struct LinearFit {
    double slope = std::numeric_limits<double>::quiet_NaN();
    double intercept = std::numeric_limits<double>::quiet_NaN();
    double r2 = std::numeric_limits<double>::quiet_NaN();
    bool ok = false;
};

// Weighted least squares y ~ a + b x; r2 is the weighted coefficient of
// determination.  Needs >= 2 distinct x with positive weight.
LinearFit weighted_linear_fit(const std::vector<double>& x, const std::vector<double>& y,
                              const std::vector<double>& w);

struct TailFit {
    double rate = std::numeric_limits<double>::quiet_NaN();  // -slope of log-survival
    double r2 = std::numeric_limits<double>::quiet_NaN();
    std::int64_t retained_lo = 0, retained_hi = -1;
    bool ok = false;
};

// Fit log(survival) vs n over the grid points with at least min_count
// exceedances and survival < 1, weighting each point by its exceedance count.
TailFit fit_log_survival(const std::vector<std::int64_t>& n_values,
                         const std::vector<std::int64_t>& exceed_counts, std::int64_t total,
                         std::int64_t min_count = 25);

}  // namespace rwre

#endif
