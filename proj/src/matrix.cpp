#include "rwre/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rwre/parallel.hpp"
#include "rwre/stats.hpp"

namespace rwre {

double Matrix2::max_norm() const {
    return std::max(std::max(a11, a12), std::max(a21, a22));
}

double Matrix2::l1_op_norm() const {
    return std::max(a11 + a21, a12 + a22);
}

Matrix2 transfer_matrix(const ProbTriple& t) {
    if (!(t.left > 0.0)) {
        throw DegenerateEnvironmentError("transfer matrix undefined: p_left = 0");
    }
    return Matrix2{(t.one + t.two) / t.left, t.two / t.left, 1.0, 0.0};
}

ScaledProduct::ScaledProduct(int renorm_period) : period_(renorm_period) {
    if (renorm_period < 1) throw InvariantViolationError("renorm period must be >= 1");
}

void ScaledProduct::append(const Matrix2& factor) {
    m_ = m_ * factor;
    ++length_;
    if (length_ % period_ == 0) renormalize();
}

void ScaledProduct::renormalize() {
    const double s = m_.max_norm();
    if (!(s > 0.0) || !std::isfinite(s)) {
        throw InternalError("scaled product norm left (0, inf) despite renormalization");
    }
    m_ = Matrix2{m_.a11 / s, m_.a12 / s, m_.a21 / s, m_.a22 / s};
    log_scale_ += std::log(s);
}

double ScaledProduct::log_norm() const { return log_scale_ + std::log(m_.max_norm()); }

double ScaledProduct::log_norm_l1() const { return log_scale_ + std::log(m_.l1_op_norm()); }

std::string to_string(Regime r) {
    switch (r) {
        case Regime::transient_right: return "TransientRight";
        case Regime::recurrent: return "Recurrent";
        case Regime::transient_left: return "TransientLeft";
    }
    return "?";
}

namespace {

Regime decide_regime(double gamma, double se, double z) {
    if (gamma > z * se) return Regime::transient_right;
    if (gamma < -z * se) return Regime::transient_left;
    return Regime::recurrent;
}

}  // namespace

RegimeReport lyapunov_estimate(const EnvModel& model, std::uint64_t seed, std::int64_t n,
                               int renorm_period, int n_batches, double z) {
    if (n < 10 * static_cast<std::int64_t>(renorm_period)) {
        throw InvariantViolationError("n must be at least 10x the renormalization period");
    }
    if (n_batches < 2) throw InvariantViolationError("need at least 2 batches");
    if (!model.admits_transfer_matrices()) {
        throw DegenerateEnvironmentError("model has support with p_left = 0");
    }

    ScaledProduct prod(renorm_period);
    std::vector<double> boundary_lognorm;
    boundary_lognorm.reserve(static_cast<std::size_t>(n_batches) + 1);
    boundary_lognorm.push_back(0.0);
    std::int64_t next_boundary_batch = 1;
    for (std::int64_t i = 0; i < n; ++i) {
        prod.append(transfer_matrix(site_law(model, seed, i)));
        if (prod.length() == next_boundary_batch * n / n_batches) {
            boundary_lognorm.push_back(prod.log_norm());
            ++next_boundary_batch;
        }
    }

    RegimeReport rep;
    rep.n_steps = n;
    rep.n_batches = n_batches;
    rep.gamma2_hat = prod.log_norm() / static_cast<double>(n);

    MeanVar batches;
    for (int b = 1; b <= n_batches; ++b) {
        const std::int64_t lo = static_cast<std::int64_t>(b - 1) * n / n_batches;
        const std::int64_t hi = static_cast<std::int64_t>(b) * n / n_batches;
        batches.add((boundary_lognorm[static_cast<std::size_t>(b)] -
                     boundary_lognorm[static_cast<std::size_t>(b - 1)]) /
                    static_cast<double>(hi - lo));
    }
    rep.stderr_ = batches.se();
    rep.regime = decide_regime(rep.gamma2_hat, rep.stderr_, z);
    if (!std::isfinite(rep.gamma2_hat)) {
        throw InternalError("non-finite Lyapunov estimate despite scaling");
    }
    return rep;
}

RegimeReport classify(const EnvModel& model, std::uint64_t seed, std::int64_t n,
                      int renorm_period, int n_batches, double z) {
    return lyapunov_estimate(model, seed, n, renorm_period, n_batches, z);
}

LdRateResult ld_rate_estimate(const EnvModel& model, double eta,
                              const std::vector<std::int64_t>& n_grid, std::uint64_t replicas,
                              std::uint64_t seed, int threads) {
    if (replicas < 1000) throw InvariantViolationError("ld rate estimation needs >= 1000 replicas");
    if (n_grid.empty()) throw InvariantViolationError("empty n grid");
    for (std::int64_t n : n_grid) {
        if (n < 2) throw InvariantViolationError("grid entries must be >= 2");
    }

    LdRateResult result;
    result.gamma2_hat =
        lyapunov_estimate(model, derive_seed(seed, 0xF1u), 200'000).gamma2_hat;
    result.eta_warning = eta >= result.gamma2_hat;

    for (std::size_t gi = 0; gi < n_grid.size(); ++gi) {
        const std::int64_t n = n_grid[gi];
        const std::uint64_t grid_seed = derive_seed(seed, 1 + gi);
        const std::uint64_t hits = parallel_map<std::uint64_t>(
            replicas, grid_seed, threads, 0ull,
            [&model, n, eta](std::uint64_t, std::uint64_t rep_seed) -> std::uint64_t {
                ScaledProduct prod;
                for (std::int64_t i = 0; i < n; ++i) {
                    prod.append(transfer_matrix(site_law(model, rep_seed, i)));
                }
                return prod.log_norm() / static_cast<double>(n) < eta ? 1ull : 0ull;
            },
            [](std::uint64_t& a, std::uint64_t b) { a += b; });

        LdRatePoint pt;
        pt.n = n;
        pt.p_hat = static_cast<double>(hits) / static_cast<double>(replicas);
        if (hits == 0) {
            pt.rate_hat = std::numeric_limits<double>::infinity();
            pt.rate_se = 0.0;
        } else {
            pt.rate_hat = -std::log(pt.p_hat) / static_cast<double>(n);
            // Var(log p_hat) ~ (1-p)/(N p)
            pt.rate_se = std::sqrt((1.0 - pt.p_hat) /
                                   (static_cast<double>(replicas) * pt.p_hat)) /
                         static_cast<double>(n);
        }
        result.points.push_back(pt);
    }
    return result;
}

}  // namespace rwre
