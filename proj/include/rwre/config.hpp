#ifndef RWRE_CONFIG_HPP
#define RWRE_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rwre/env.hpp"

namespace rwre {

// Fully resolved experiment description.  The manifest echoes exactly the
// keys applicable to the subcommand, so a manifest is itself a valid config.
struct ExperimentConfig {
    std::string subcommand;
    EnvModel model = EnvModel::point_mass(ProbTriple{1.0 / 3, 1.0 / 3, 1.0 / 3});
    std::uint64_t seed = 1;
    std::string output_dir = "out";

    std::int64_t n = 1'000'000;      // classify / lyapunov
    int renorm_period = 16;
    int n_batches = 10;
    double z = 3.0;

    std::uint64_t replicas = 0;      // 0 -> subcommand default
    std::int64_t x_max = 0;          // 0 -> subcommand default
    std::int64_t confirm_w = 200;
    std::int64_t confirm_c = 200;
    std::int64_t cap = 0;            // 0 -> auto
    std::vector<std::int64_t> n_grid;
    std::optional<double> eta;
};

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

// Resolved-config echo in the config syntax.
std::string manifest_text(const ExperimentConfig& cfg);

// Runs the experiment, writing manifest.cfg, data CSVs and summary.json into
// cfg.output_dir.  Returns the process exit status; runtime failures are
// recorded as a structured error object in summary.json.
int run_experiment(const ExperimentConfig& cfg, int threads);

// 17-significant-digit float formatting used for all CSV/manifest output.
std::string fmt17(double x);

}  // namespace rwre

#endif
