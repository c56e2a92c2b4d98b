#ifndef RWRE_ENV_HPP
#define RWRE_ENV_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "rwre/errors.hpp"
#include "rwre/rng.hpp"

namespace rwre {

// One site's jump law: probabilities of a -1, +1 and +2 move.
struct ProbTriple {
    double left = 0.0;
    double one = 0.0;
    double two = 0.0;

    double sum() const { return left + one + two; }
    double min_component() const;

    // Simplex membership within 1e-12 and component >= floor.
    void check(double floor) const;
};

enum class ModelKind { point_mass, finite_mixture, dirichlet_floor };

// Distribution over ProbTriples; sites draw i.i.d. from it.
class EnvModel {
  public:
    static EnvModel point_mass(const ProbTriple& t, double floor = 0.0);
    static EnvModel finite_mixture(std::vector<ProbTriple> atoms, std::vector<double> weights,
                                   double floor = 0.0);
    static EnvModel dirichlet_floor(const std::array<double, 3>& alpha, double floor);

    ModelKind kind() const { return kind_; }
    double floor() const { return floor_; }
    const std::vector<ProbTriple>& atoms() const { return atoms_; }
    const std::vector<double>& weights() const { return weights_; }
    const std::array<double, 3>& alpha() const { return alpha_; }

    ProbTriple sample(Xoshiro256pp& rng) const;

    // True when no support triple can step left (walk is monotone increasing).
    bool never_steps_left() const;
    // True when every draw has p_left > 0, so transfer matrices exist.
    bool admits_transfer_matrices() const;
    // True when some support triple has a zero component, violating the
    // floored-model assumption; reports flag such models.
    bool has_zero_component() const;
    // Exact E[p_left] under the model.
    double mean_left() const;
    // Exact E[p_two].
    double mean_two() const;

    std::string describe() const;

  private:
    EnvModel() = default;
    ModelKind kind_ = ModelKind::point_mass;
    double floor_ = 0.0;
    std::vector<ProbTriple> atoms_;    // point_mass: 1 entry; mixture: >= 1
    std::vector<double> weights_;      // mixture only
    std::array<double, 3> alpha_{1.0, 1.0, 1.0};
};

// Deterministic per-site law: pure function of (model, seed, site).
ProbTriple site_law(const EnvModel& model, std::uint64_t seed, std::int64_t site);

// A realized window of triples.  Immutable after construction; extending a
// window re-realizes (per-site determinism makes the overlap identical).
class Environment {
  public:
    Environment(EnvModel model, std::uint64_t seed, std::int64_t lo, std::int64_t hi);

    const ProbTriple& at(std::int64_t site) const {
        if (site < lo_ || site > hi_) {
            throw WindowError("site " + std::to_string(site) + " outside realized window [" +
                              std::to_string(lo_) + ", " + std::to_string(hi_) + "]");
        }
        return triples_[static_cast<std::size_t>(site - lo_)];
    }

    std::int64_t lo() const { return lo_; }
    std::int64_t hi() const { return hi_; }
    const EnvModel& model() const { return model_; }
    std::uint64_t seed() const { return seed_; }

    Environment extended(std::int64_t lo, std::int64_t hi) const;

  private:
    EnvModel model_;
    std::uint64_t seed_ = 0;
    std::int64_t lo_ = 0;
    std::int64_t hi_ = -1;
    std::vector<ProbTriple> triples_;
};

Environment realize_window(const EnvModel& model, std::uint64_t seed, std::int64_t lo,
                           std::int64_t hi);

// Worker-local window that grows on demand.  Not shareable across threads;
// sites already realized never change, so an in-flight walk is unaffected
// by growth.
class LazyEnvironment {
  public:
    LazyEnvironment(EnvModel model, std::uint64_t seed, std::int64_t lo, std::int64_t hi)
        : env_(std::move(model), seed, lo, hi) {}

    const ProbTriple& at(std::int64_t site) {
        if (site < env_.lo() || site > env_.hi()) grow(site);
        return env_.at(site);
    }

    const Environment& env() const { return env_; }

  private:
    void grow(std::int64_t site);
    Environment env_;
};

}  // namespace rwre

#endif
