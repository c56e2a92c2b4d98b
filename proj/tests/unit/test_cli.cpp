#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "rwre/config.hpp"

using namespace rwre;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

json run_and_load(const std::string& cfg_text, int threads = 2, int want_status = 0) {
    static int counter = 0;
    const fs::path dir = fs::temp_directory_path() / ("rwre_cli_test_" + std::to_string(counter++));
    fs::remove_all(dir);
    const ExperimentConfig cfg =
        parse_config_text(cfg_text + "output_dir = " + dir.string() + "\n");
    const int status = run_experiment(cfg, threads);
    CHECK(status == want_status);
    CHECK(fs::exists(dir / "manifest.cfg"));
    std::ifstream in(dir / "summary.json");
    json summary;
    in >> summary;
    fs::remove_all(dir);
    return summary;
}

const char* kPointMass =
    "model {\n"
    "    kind = point_mass\n"
    "    triple = 0.2 0.4 0.4\n"
    "}\n";

}  // namespace

TEST_CASE("classify run reports the regime in summary.json") {
    const json s = run_and_load(std::string("subcommand = classify\nseed = 3\nn = 200000\n") +
                                kPointMass);
    CHECK(s["status"] == "ok");
    CHECK(s["regime"] == "TransientRight");
    CHECK(s["gamma2_hat"].get<double>() > 1.0);
}

TEST_CASE("every subcommand runs end to end at desk scale") {
    const json ld = run_and_load(std::string("subcommand = ld-rate\nseed = 4\neta = 1.0\n"
                                             "n_grid = 20 40\nreplicas = 1000\n") +
                                 kPointMass);
    CHECK(ld["status"] == "ok");
    CHECK(ld["points"].size() == 2);

    const json range = run_and_load(std::string("subcommand = range\nseed = 5\nx_max = 2000\n"
                                                "confirm_w = 100\n") +
                                    kPointMass);
    CHECK(range["status"] == "ok");
    CHECK(range["census_exact"] == true);

    const json renew = run_and_load(std::string("subcommand = renewals\nseed = 6\nx_max = 2000\n"
                                                "confirm_w = 100\n") +
                                    kPointMass);
    CHECK(renew["status"] == "ok");
    CHECK(renew["n_records"].get<std::int64_t>() > 0);
    CHECK(renew["starvation_warning"] == false);

    const json ident = run_and_load(std::string("subcommand = identities\nseed = 7\n"
                                                "replicas = 300\nconfirm_w = 40\n") +
                                    kPointMass);
    CHECK(ident["status"] == "ok");
    CHECK(ident["primary"]["checks"].size() == 8);

    const json hit = run_and_load(
        "subcommand = hitting\nseed = 8\nn_grid = 0 1 2 5 10\n"
        "model {\n    kind = dirichlet_floor\n    alpha = 1 1 1\n    floor = 0.05\n}\n");
    CHECK(hit["status"] == "ok");
    CHECK(hit["max_rel_err"].get<double>() < 1e-9);

    const json tail = run_and_load(std::string("subcommand = tail\nseed = 9\nreplicas = 2000\n"
                                               "n_grid = 0 1 2 3\nconfirm_c = 60\n") +
                                   kPointMass);
    CHECK(tail["status"] == "ok");
    CHECK(tail["p_d_finite"].get<double>() > 0.0);
}

TEST_CASE("runtime failures become structured error records with exit 1") {
    const json s = run_and_load(std::string("subcommand = range\nseed = 5\nx_max = 2000\n") +
                                    "model {\n    kind = point_mass\n"
                                    "    triple = 0.8 0.1 0.1\n}\n",
                                2, 1);
    CHECK(s["status"] == "error");
    CHECK(s["error"]["type"] == "run");
    const std::string msg = s["error"]["message"].get<std::string>();
    CHECK(msg.find("TransientLeft") != std::string::npos);
}
