// Experiment runner: parses a config file, runs the requested study and
// writes manifest.cfg, CSV data files and summary.json into its output
// directory.  Outputs are byte-identical for identical configs at any
// thread count.

#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "rwre/config.hpp"

int main(int argc, char** argv) {
    CLI::App app{"(1,2) random walk in random environment laboratory"};
    std::string config_path;
    int threads = 0;
    app.add_option("config", config_path, "experiment config file")->required();
    app.add_option("--threads", threads, "worker threads (0 = hardware concurrency)");
    CLI11_PARSE(app, argc, argv);

    rwre::ExperimentConfig cfg;
    try {
        cfg = rwre::parse_config_file(config_path);
    } catch (const rwre::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    }
    try {
        return rwre::run_experiment(cfg, threads);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
