#ifndef RWRE_MATRIX_HPP
#define RWRE_MATRIX_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "rwre/env.hpp"

namespace rwre {

// 2x2 nonnegative matrix; transfer matrices have the fixed bottom row (1, 0).
struct Matrix2 {
    double a11 = 1.0, a12 = 0.0;
    double a21 = 0.0, a22 = 1.0;

    static Matrix2 identity() { return Matrix2{}; }

    Matrix2 operator*(const Matrix2& o) const {
        return Matrix2{a11 * o.a11 + a12 * o.a21, a11 * o.a12 + a12 * o.a22,
                       a21 * o.a11 + a22 * o.a21, a21 * o.a12 + a22 * o.a22};
    }

    double max_norm() const;     // largest entry magnitude
    double l1_op_norm() const;   // largest column sum (entries are nonnegative)
    bool all_positive() const { return a11 > 0.0 && a12 > 0.0 && a21 > 0.0 && a22 > 0.0; }
};

// [[ (p1+p2)/p_left, p2/p_left ], [1, 0]].  Throws on p_left = 0.
Matrix2 transfer_matrix(const ProbTriple& t);

// Running product of factors carried as (unit-max-norm matrix, log of the
// extracted scale) so that arbitrarily long products never overflow.
class ScaledProduct {
  public:
    explicit ScaledProduct(int renorm_period = 16);

    void append(const Matrix2& factor);  // right-multiply

    double log_norm() const;     // log (max-norm of the full product)
    double log_norm_l1() const;  // same with the L1 operator norm
    std::int64_t length() const { return length_; }
    const Matrix2& normalized() const { return m_; }
    double log_scale() const { return log_scale_; }

  private:
    void renormalize();
    Matrix2 m_ = Matrix2::identity();
    double log_scale_ = 0.0;
    std::int64_t length_ = 0;
    int period_ = 16;
};

enum class Regime { transient_right, recurrent, transient_left };

std::string to_string(Regime r);

struct RegimeReport {
    double gamma2_hat = 0.0;
    double stderr_ = 0.0;
    Regime regime = Regime::recurrent;
    std::int64_t n_steps = 0;
    int n_batches = 0;
};

// Top Lyapunov exponent of the transfer-matrix product over sites 0..n-1 of
// the (model, seed) environment; stderr from contiguous batch means.
RegimeReport lyapunov_estimate(const EnvModel& model, std::uint64_t seed, std::int64_t n,
                               int renorm_period = 16, int n_batches = 10, double z = 3.0);

// Sign test on gamma2_hat at z standard errors.
RegimeReport classify(const EnvModel& model, std::uint64_t seed, std::int64_t n,
                      int renorm_period = 16, int n_batches = 10, double z = 3.0);

struct LdRatePoint {
    std::int64_t n = 0;
    double p_hat = 0.0;
    double rate_hat = 0.0;  // -log(p_hat)/n; +infinity when p_hat = 0
    double rate_se = 0.0;   // delta-method SE; 0 when p_hat is 0 or 1
};

struct LdRateResult {
    std::vector<LdRatePoint> points;
    double gamma2_hat = 0.0;   // internal estimate used for the warning flag
    bool eta_warning = false;  // eta >= estimated top exponent
};

// Frequency of { (1/n) log ||product of n factors|| < eta } per grid point.
LdRateResult ld_rate_estimate(const EnvModel& model, double eta,
                              const std::vector<std::int64_t>& n_grid, std::uint64_t replicas,
                              std::uint64_t seed, int threads = 0);

}  // namespace rwre

#endif
