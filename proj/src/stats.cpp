#include "rwre/stats.hpp"

#include <algorithm>

namespace rwre {

LinearFit weighted_linear_fit(const std::vector<double>& x, const std::vector<double>& y,
                              const std::vector<double>& w) {
    LinearFit fit;
    if (x.size() != y.size() || x.size() != w.size() || x.size() < 2) return fit;
    double sw = 0.0, swx = 0.0, swy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sw += w[i];
        swx += w[i] * x[i];
        swy += w[i] * y[i];
    }
    if (!(sw > 0.0)) return fit;
    const double mx = swx / sw;
    const double my = swy / sw;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += w[i] * (x[i] - mx) * (x[i] - mx);
        sxy += w[i] * (x[i] - mx) * (y[i] - my);
    }
    if (!(sxx > 0.0)) return fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (fit.intercept + fit.slope * x[i]);
        ss_res += w[i] * r * r;
        ss_tot += w[i] * (y[i] - my) * (y[i] - my);
    }
    fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    fit.ok = true;
    return fit;
}

TailFit fit_log_survival(const std::vector<std::int64_t>& n_values,
                         const std::vector<std::int64_t>& exceed_counts, std::int64_t total,
                         std::int64_t min_count) {
    TailFit out;
    if (total <= 0 || n_values.size() != exceed_counts.size()) return out;
    std::vector<double> x, y, w;
    bool have_lo = false;
    for (std::size_t i = 0; i < n_values.size(); ++i) {
        const std::int64_t c = exceed_counts[i];
        if (c < min_count || c >= total) continue;  // drop unstable and vacuous points
        x.push_back(static_cast<double>(n_values[i]));
        y.push_back(std::log(static_cast<double>(c) / static_cast<double>(total)));
        w.push_back(static_cast<double>(c));
        if (!have_lo) {
            out.retained_lo = n_values[i];
            have_lo = true;
        }
        out.retained_hi = n_values[i];
    }
    const LinearFit fit = weighted_linear_fit(x, y, w);
    if (!fit.ok) return out;
    out.rate = -fit.slope;
    out.r2 = fit.r2;
    out.ok = true;
    return out;
}

}  // namespace rwre
