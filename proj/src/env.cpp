#include "rwre/env.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace rwre {

namespace {

constexpr double kSimplexTol = 1e-12;

// Stream key for site i: hash the seed together with the site index so that
// negative and far-apart sites get unrelated streams.  Fixed construction;
// replays must match it exactly.
std::uint64_t site_key(std::uint64_t seed, std::int64_t site) {
    return mix64(seed ^ mix64(static_cast<std::uint64_t>(site)));
}

}  // namespace

double ProbTriple::min_component() const { return std::min(left, std::min(one, two)); }

void ProbTriple::check(double floor) const {
    if (!(left >= 0.0 && left <= 1.0 && one >= 0.0 && one <= 1.0 && two >= 0.0 && two <= 1.0)) {
        throw InvariantViolationError("triple component outside [0, 1]");
    }
    if (std::fabs(sum() - 1.0) > kSimplexTol) {
        throw InvariantViolationError("triple does not sum to 1 within 1e-12");
    }
    if (floor > 0.0 && min_component() < floor - kSimplexTol) {
        throw InvariantViolationError("triple component below declared floor");
    }
}

EnvModel EnvModel::point_mass(const ProbTriple& t, double floor) {
    t.check(floor);
    EnvModel m;
    m.kind_ = ModelKind::point_mass;
    m.floor_ = floor;
    m.atoms_ = {t};
    return m;
}

EnvModel EnvModel::finite_mixture(std::vector<ProbTriple> atoms, std::vector<double> weights,
                                  double floor) {
    if (atoms.empty() || atoms.size() != weights.size()) {
        throw InvariantViolationError("mixture needs matching nonempty atoms and weights");
    }
    double wsum = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw InvariantViolationError("negative mixture weight");
        wsum += w;
    }
    if (std::fabs(wsum - 1.0) > kSimplexTol) {
        throw InvariantViolationError("mixture weights do not sum to 1 within 1e-12");
    }
    for (const auto& a : atoms) a.check(floor);
    EnvModel m;
    m.kind_ = ModelKind::finite_mixture;
    m.floor_ = floor;
    m.atoms_ = std::move(atoms);
    m.weights_ = std::move(weights);
    return m;
}

EnvModel EnvModel::dirichlet_floor(const std::array<double, 3>& alpha, double floor) {
    for (double a : alpha) {
        if (!(a > 0.0)) throw InvariantViolationError("Dirichlet shape parameters must be > 0");
    }
    if (floor < 0.0 || floor >= 1.0 / 3.0) {
        throw InvariantViolationError("floor must lie in [0, 1/3)");
    }
    EnvModel m;
    m.kind_ = ModelKind::dirichlet_floor;
    m.floor_ = floor;
    m.alpha_ = alpha;
    return m;
}

ProbTriple EnvModel::sample(Xoshiro256pp& rng) const {
    switch (kind_) {
        case ModelKind::point_mass:
            return atoms_[0];
        case ModelKind::finite_mixture: {
            const double u = rng.uniform01();
            double acc = 0.0;
            for (std::size_t i = 0; i + 1 < atoms_.size(); ++i) {
                acc += weights_[i];
                if (u < acc) return atoms_[i];
            }
            return atoms_.back();
        }
        case ModelKind::dirichlet_floor: {
            double g0 = gamma_sample(rng, alpha_[0]);
            double g1 = gamma_sample(rng, alpha_[1]);
            double g2 = gamma_sample(rng, alpha_[2]);
            const double s = g0 + g1 + g2;
            const double e = floor_;
            const double shrink = 1.0 - 3.0 * e;
            return ProbTriple{e + shrink * g0 / s, e + shrink * g1 / s, e + shrink * g2 / s};
        }
    }
    throw InternalError("unreachable model kind");
}

bool EnvModel::never_steps_left() const {
    if (kind_ == ModelKind::dirichlet_floor) return false;
    for (const auto& a : atoms_) {
        if (a.left > 0.0) return false;
    }
    return true;
}

bool EnvModel::admits_transfer_matrices() const {
    if (kind_ == ModelKind::dirichlet_floor) return true;  // p_left > 0 almost surely
    for (const auto& a : atoms_) {
        if (a.left <= 0.0) return false;
    }
    return true;
}

bool EnvModel::has_zero_component() const {
    if (kind_ == ModelKind::dirichlet_floor) return false;
    for (const auto& a : atoms_) {
        if (a.min_component() <= 0.0) return true;
    }
    return false;
}

double EnvModel::mean_left() const {
    switch (kind_) {
        case ModelKind::point_mass:
            return atoms_[0].left;
        case ModelKind::finite_mixture: {
            double m = 0.0;
            for (std::size_t i = 0; i < atoms_.size(); ++i) m += weights_[i] * atoms_[i].left;
            return m;
        }
        case ModelKind::dirichlet_floor:
            return floor_ + (1.0 - 3.0 * floor_) * alpha_[0] / (alpha_[0] + alpha_[1] + alpha_[2]);
    }
    throw InternalError("unreachable model kind");
}

double EnvModel::mean_two() const {
    switch (kind_) {
        case ModelKind::point_mass:
            return atoms_[0].two;
        case ModelKind::finite_mixture: {
            double m = 0.0;
            for (std::size_t i = 0; i < atoms_.size(); ++i) m += weights_[i] * atoms_[i].two;
            return m;
        }
        case ModelKind::dirichlet_floor:
            return floor_ + (1.0 - 3.0 * floor_) * alpha_[2] / (alpha_[0] + alpha_[1] + alpha_[2]);
    }
    throw InternalError("unreachable model kind");
}

std::string EnvModel::describe() const {
    std::ostringstream out;
    switch (kind_) {
        case ModelKind::point_mass:
            out << "point_mass(" << atoms_[0].left << ", " << atoms_[0].one << ", " << atoms_[0].two
                << ")";
            break;
        case ModelKind::finite_mixture:
            out << "finite_mixture(" << atoms_.size() << " atoms)";
            break;
        case ModelKind::dirichlet_floor:
            out << "dirichlet_floor(" << alpha_[0] << ", " << alpha_[1] << ", " << alpha_[2]
                << "; floor " << floor_ << ")";
            break;
    }
    return out.str();
}

ProbTriple site_law(const EnvModel& model, std::uint64_t seed, std::int64_t site) {
    Xoshiro256pp stream(site_key(seed, site));
    return model.sample(stream);
}

Environment::Environment(EnvModel model, std::uint64_t seed, std::int64_t lo, std::int64_t hi)
    : model_(std::move(model)), seed_(seed), lo_(lo), hi_(hi) {
    if (lo > hi) {
        throw InvalidWindowError("invalid window: lo " + std::to_string(lo) + " > hi " +
                                 std::to_string(hi));
    }
    triples_.reserve(static_cast<std::size_t>(hi - lo + 1));
    for (std::int64_t i = lo; i <= hi; ++i) triples_.push_back(site_law(model_, seed_, i));
}

Environment Environment::extended(std::int64_t lo, std::int64_t hi) const {
    return Environment(model_, seed_, std::min(lo, lo_), std::max(hi, hi_));
}

Environment realize_window(const EnvModel& model, std::uint64_t seed, std::int64_t lo,
                           std::int64_t hi) {
    return Environment(model, seed, lo, hi);
}

void LazyEnvironment::grow(std::int64_t site) {
    std::int64_t lo = env_.lo();
    std::int64_t hi = env_.hi();
    const std::int64_t span = hi - lo + 1;
    while (site < lo) lo -= span;
    while (site > hi) hi += span;
    env_ = env_.extended(lo, hi);
}

}  // namespace rwre
