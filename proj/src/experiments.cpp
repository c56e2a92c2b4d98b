#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "rwre/config.hpp"
#include "rwre/hitting.hpp"
#include "rwre/matrix.hpp"
#include "rwre/range.hpp"
#include "rwre/renewal.hpp"
#include "rwre/walk.hpp"

namespace rwre {

namespace {

using json = nlohmann::json;

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
}

json check_to_json(const IdentityCheck& c) {
    return json{{"name", c.name}, {"lhs", c.lhs},   {"rhs", c.rhs},
                {"se", c.se},     {"pass", c.pass}, {"is_bound", c.is_bound}};
}

json numbers_to_json(const IdentityNumbers& n) {
    json checks = json::array();
    for (const auto& c : n.checks) checks.push_back(check_to_json(c));
    return json{{"confirm", n.confirm},
                {"checks", checks},
                {"first_epoch_tail",
                 json{{"rate", n.first_epoch_tail.rate},
                      {"r2", n.first_epoch_tail.r2},
                      {"retained_lo", n.first_epoch_tail.retained_lo},
                      {"retained_hi", n.first_epoch_tail.retained_hi},
                      {"pass", n.first_epoch_tail.pass}}},
                {"mean_first_passage_landing", n.mean_first_passage_landing},
                {"mean_m_plus_xi_returned", n.mean_m_plus_xi_returned},
                {"p_escape", n.p_escape},
                {"mean_first_epoch_pos", n.mean_first_epoch_pos},
                {"mean_first_nu_pos", n.mean_first_nu_pos},
                {"discarded", n.discarded}};
}

void run_lyapunov(const ExperimentConfig& cfg, const std::filesystem::path& dir, json& summary) {
    const RegimeReport rep = lyapunov_estimate(cfg.model, cfg.seed, cfg.n, cfg.renorm_period,
                                               cfg.n_batches, cfg.z);
    std::string csv = "n,gamma2_hat,stderr,regime\n";
    csv += std::to_string(rep.n_steps) + "," + fmt17(rep.gamma2_hat) + "," + fmt17(rep.stderr_) +
           "," + to_string(rep.regime) + "\n";
    write_file(dir / "lyapunov.csv", csv);
    summary["gamma2_hat"] = rep.gamma2_hat;
    summary["stderr"] = rep.stderr_;
    summary["regime"] = to_string(rep.regime);
    summary["n"] = rep.n_steps;
    summary["n_batches"] = rep.n_batches;
}

void run_ld_rate(const ExperimentConfig& cfg, const std::filesystem::path& dir, json& summary,
                 int threads) {
    const LdRateResult res =
        ld_rate_estimate(cfg.model, *cfg.eta, cfg.n_grid, cfg.replicas, cfg.seed, threads);
    std::string csv = "n,p_hat,rate_hat\n";
    json points = json::array();
    for (const auto& p : res.points) {
        csv += std::to_string(p.n) + "," + fmt17(p.p_hat) + "," + fmt17(p.rate_hat) + "\n";
        points.push_back(json{{"n", p.n},
                              {"p_hat", p.p_hat},
                              {"rate_hat", p.rate_hat},
                              {"rate_se", p.rate_se}});
    }
    write_file(dir / "ld_rate.csv", csv);
    summary["gamma2_hat"] = res.gamma2_hat;
    summary["eta"] = *cfg.eta;
    summary["eta_warning"] = res.eta_warning;
    summary["replicas"] = cfg.replicas;
    summary["points"] = points;
}

void run_range(const ExperimentConfig& cfg, const std::filesystem::path& dir, json& summary) {
    const RangeStats rs = range_count(cfg.model, cfg.seed, cfg.x_max, cfg.confirm_w, cfg.cap);
    std::string csv = "x,n_visited\n";
    for (const auto& [x, n] : rs.n_curve) {
        csv += std::to_string(x) + "," + std::to_string(n) + "\n";
    }
    write_file(dir / "range_counts.csv", csv);
    summary["x_max"] = rs.x_max;
    summary["theta_direct"] = rs.theta_direct;
    summary["theta_direct_se"] = rs.theta_direct_se;
    summary["theta_renewal"] = rs.theta_renewal;
    summary["theta_renewal_se"] = rs.theta_renewal_se;
    summary["theta_renewal_2w"] = rs.theta_renewal_2w;
    summary["theta_renewal_2w_se"] = rs.theta_renewal_2w_se;
    summary["n_visited"] = rs.n_visited;
    summary["skipped_in_range"] = rs.skipped_in_range;
    summary["skipped_up_to_last_nu"] = rs.skipped_up_to_last_nu;
    summary["n_nu_epochs"] = rs.n_nu_epochs;
    summary["census_exact"] = rs.census_exact;
    summary["n_blocks"] = rs.n_blocks;
    summary["mean_x"] = rs.mean_x;
    summary["se_x"] = rs.se_x;
    summary["overshoot1_frac"] = rs.overshoot1_frac;
    summary["steps"] = rs.steps;
    summary["starved"] = rs.starved;
    summary["degenerate_zero_component"] = cfg.model.has_zero_component();
}

void run_renewals(const ExperimentConfig& cfg, const std::filesystem::path& dir, json& summary) {
    if (!cfg.model.never_steps_left()) {
        const RegimeReport reg = classify(cfg.model, derive_seed(cfg.seed, 0xC0DE), 200'000);
        if (reg.regime != Regime::transient_right) {
            throw RegimeError("renewal scan requires a right-transient model, classified " +
                              to_string(reg.regime));
        }
    }
    const std::int64_t horizon = cfg.x_max + 2 * cfg.confirm_w;
    const Environment env =
        realize_window(cfg.model, derive_seed(cfg.seed, 1), -512, horizon + 2);
    Xoshiro256pp rng(derive_seed(cfg.seed, 2));
    RenewalScanner scan_w(cfg.confirm_w);
    RenewalScanner scan_2w(2 * cfg.confirm_w);
    const WalkSummary walk = run_walk(env, horizon, rng, cfg.cap, scan_w, scan_2w);

    std::string records_csv = "time,position,overshoot\n";
    std::int64_t overshoot1 = 0;
    for (const auto& r : scan_w.records()) {
        records_csv += std::to_string(r.time) + "," + std::to_string(r.position) + "," +
                       std::to_string(r.overshoot) + "\n";
        overshoot1 += r.overshoot == 1 ? 1 : 0;
    }
    write_file(dir / "records.csv", records_csv);

    bool warn = false;
    const std::vector<NuBlock> blocks = nu_blocks(scan_w.records(), &warn);
    std::string blocks_csv = "start_pos,end_pos,x_increment,t_increment,skipped_site\n";
    for (const auto& b : blocks) {
        blocks_csv += std::to_string(b.start_pos) + "," + std::to_string(b.end_pos) + "," +
                      std::to_string(b.x_increment) + "," + std::to_string(b.t_increment) + "," +
                      std::to_string(b.skipped_site) + "\n";
    }
    write_file(dir / "blocks.csv", blocks_csv);

    summary["steps"] = walk.steps;
    summary["final_position"] = walk.final_position;
    summary["n_records"] = scan_w.records().size();
    summary["starvation_warning"] = scan_w.starved();
    summary["too_few_nu_epochs"] = warn;
    summary["n_blocks"] = blocks.size();
    if (!scan_w.records().empty()) {
        summary["overshoot1_frac"] =
            static_cast<double>(overshoot1) / static_cast<double>(scan_w.records().size());
    }
    if (!blocks.empty()) {
        const BlockStats bs = block_stats(blocks);
        summary["mean_x"] = bs.mean_x;
        summary["se_x"] = bs.se_x;
        if (bs.n_blocks >= 30) {
            const auto [theta, se] = theta_renewal(bs);
            summary["theta_renewal"] = theta;
            summary["theta_renewal_se"] = se;
        }
    }
    bool warn2 = false;
    const std::vector<NuBlock> blocks_2w = nu_blocks(scan_2w.records(), &warn2);
    if (static_cast<std::int64_t>(blocks_2w.size()) >= 30) {
        const auto [theta, se] = theta_renewal(block_stats(blocks_2w));
        summary["theta_renewal_2w"] = theta;
        summary["theta_renewal_2w_se"] = se;
    }
}

void run_identities(const ExperimentConfig& cfg, json& summary, int threads) {
    const IdentityReport rep =
        identity_report(cfg.model, cfg.replicas, cfg.seed, cfg.confirm_w, threads);
    summary["replicas_per_group"] = rep.replicas_per_group;
    summary["primary"] = numbers_to_json(rep.primary);
    summary["doubled"] = numbers_to_json(rep.doubled);
    bool all_pass = rep.primary.first_epoch_tail.pass;
    for (const auto& c : rep.primary.checks) all_pass = all_pass && c.pass;
    summary["all_pass"] = all_pass;
}

void run_hitting(const ExperimentConfig& cfg, const std::filesystem::path& dir, json& summary) {
    std::int64_t n_max = 0;
    for (std::int64_t n : cfg.n_grid) {
        if (n < 0) throw ConfigError("hitting n_grid entries must be >= 0");
        n_max = std::max(n_max, n);
    }
    const Environment env = realize_window(cfg.model, cfg.seed, -n_max, 0);
    std::string csv = "n,log_p_formula,log_p_oracle,rel_err\n";
    double max_rel_err = 0.0;
    for (std::int64_t n : cfg.n_grid) {
        const HittingResult f = hit_left_prob_formula(env, n);
        const HittingResult o = hit_left_prob_oracle(env, n);
        const double rel = std::fabs(f.p - o.p) / std::max(o.p, 1e-300);
        max_rel_err = std::max(max_rel_err, rel);
        csv += std::to_string(n) + "," + fmt17(f.log_p) + "," + fmt17(o.log_p) + "," + fmt17(rel) +
               "\n";
    }
    write_file(dir / "hitting.csv", csv);
    summary["n_max"] = n_max;
    summary["max_rel_err"] = max_rel_err;
}

void run_tail(const ExperimentConfig& cfg, const std::filesystem::path& dir, json& summary,
              int threads) {
    const TailCurve tc =
        tail_estimate(cfg.model, cfg.n_grid, cfg.replicas, cfg.confirm_c, cfg.seed, threads);
    std::string csv = "n,survival,ci_lo,ci_hi\n";
    for (std::size_t i = 0; i < tc.n_grid.size(); ++i) {
        csv += std::to_string(tc.n_grid[i]) + "," + fmt17(tc.survival[i]) + "," +
               fmt17(tc.ci_lo[i]) + "," + fmt17(tc.ci_hi[i]) + "\n";
    }
    write_file(dir / "survival.csv", csv);
    summary["replicas"] = tc.replicas;
    summary["confirm_c"] = tc.confirm_c;
    summary["p_d_finite"] = tc.p_d_finite;
    summary["p_d_finite_2c"] = tc.p_d_finite_2c;
    summary["degenerate_tail"] = tc.degenerate;
    summary["fit_ok"] = tc.fit_ok;
    summary["fitted_rate"] = tc.fitted_rate;
    summary["fit_r2"] = tc.fit_r2;
    summary["retained_lo"] = tc.retained_lo;
    summary["retained_hi"] = tc.retained_hi;
    summary["mean_left"] = cfg.model.mean_left();
    summary["degenerate_zero_component"] = cfg.model.has_zero_component();
}

}  // namespace

int run_experiment(const ExperimentConfig& cfg, int threads) {
    const std::filesystem::path dir(cfg.output_dir);
    std::filesystem::create_directories(dir);
    write_file(dir / "manifest.cfg", manifest_text(cfg));

    json summary;
    summary["subcommand"] = cfg.subcommand;
    try {
        if (cfg.subcommand == "classify" || cfg.subcommand == "lyapunov") {
            run_lyapunov(cfg, dir, summary);
        } else if (cfg.subcommand == "ld-rate") {
            run_ld_rate(cfg, dir, summary, threads);
        } else if (cfg.subcommand == "range") {
            run_range(cfg, dir, summary);
        } else if (cfg.subcommand == "renewals") {
            run_renewals(cfg, dir, summary);
        } else if (cfg.subcommand == "identities") {
            run_identities(cfg, summary, threads);
        } else if (cfg.subcommand == "hitting") {
            run_hitting(cfg, dir, summary);
        } else if (cfg.subcommand == "tail") {
            run_tail(cfg, dir, summary, threads);
        } else {
            throw ConfigError("unknown subcommand '" + cfg.subcommand + "'");
        }
    } catch (const WorkerError& e) {
        summary["status"] = "error";
        summary["error"] = json{{"type", "worker"},
                                {"message", e.what()},
                                {"replica", e.replica},
                                {"derived_seed", e.seed}};
        write_file(dir / "summary.json", summary.dump(2) + "\n");
        return 1;
    } catch (const Error& e) {
        summary["status"] = "error";
        summary["error"] = json{{"type", "run"}, {"message", e.what()}};
        write_file(dir / "summary.json", summary.dump(2) + "\n");
        return 1;
    }
    summary["status"] = "ok";
    write_file(dir / "summary.json", summary.dump(2) + "\n");
    return 0;
}

}  // namespace rwre
