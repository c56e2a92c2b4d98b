#include "rwre/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace rwre {

namespace {

const std::set<std::string> kSubcommands = {"classify", "lyapunov", "ld-rate", "range",
                                            "renewals", "identities", "hitting", "tail"};

// Keys every subcommand accepts, then per-subcommand extras.
const std::set<std::string> kCommonKeys = {"subcommand", "seed", "output_dir"};

std::set<std::string> keys_for(const std::string& sub) {
    std::set<std::string> keys = kCommonKeys;
    if (sub == "classify" || sub == "lyapunov") {
        keys.insert({"n", "renorm_period", "n_batches", "z"});
    } else if (sub == "ld-rate") {
        keys.insert({"eta", "n_grid", "replicas"});
    } else if (sub == "range" || sub == "renewals") {
        keys.insert({"x_max", "confirm_w", "cap"});
    } else if (sub == "identities") {
        keys.insert({"replicas", "confirm_w"});
    } else if (sub == "hitting") {
        keys.insert({"n_grid"});
    } else if (sub == "tail") {
        keys.insert({"replicas", "n_grid", "confirm_c"});
    }
    return keys;
}

const std::set<std::string> kModelKeys = {"kind", "triple", "atoms", "weights", "alpha", "floor"};

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

struct RawEntry {
    std::string value;
    int line = 0;
};

double parse_double(const std::string& key, const RawEntry& e) {
    try {
        std::size_t used = 0;
        const double v = std::stod(e.value, &used);
        if (used != e.value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("line " + std::to_string(e.line) + ": key '" + key +
                          "' expects a number, got '" + e.value + "'");
    }
}

std::int64_t parse_int(const std::string& key, const RawEntry& e) {
    try {
        std::size_t used = 0;
        const long long v = std::stoll(e.value, &used);
        if (used != e.value.size()) throw std::invalid_argument("trailing characters");
        return static_cast<std::int64_t>(v);
    } catch (const std::exception&) {
        throw ConfigError("line " + std::to_string(e.line) + ": key '" + key +
                          "' expects an integer, got '" + e.value + "'");
    }
}

std::uint64_t parse_uint(const std::string& key, const RawEntry& e) {
    try {
        std::size_t used = 0;
        const unsigned long long v = std::stoull(e.value, &used);
        if (used != e.value.size()) throw std::invalid_argument("trailing characters");
        return static_cast<std::uint64_t>(v);
    } catch (const std::exception&) {
        throw ConfigError("line " + std::to_string(e.line) + ": key '" + key +
                          "' expects a nonnegative integer, got '" + e.value + "'");
    }
}

std::vector<double> parse_double_list(const std::string& key, const RawEntry& e) {
    std::istringstream in(e.value);
    std::vector<double> out;
    std::string tok;
    while (in >> tok) out.push_back(parse_double(key, RawEntry{tok, e.line}));
    return out;
}

std::vector<std::int64_t> parse_int_list(const std::string& key, const RawEntry& e) {
    std::istringstream in(e.value);
    std::vector<std::int64_t> out;
    std::string tok;
    while (in >> tok) out.push_back(parse_int(key, RawEntry{tok, e.line}));
    return out;
}

ProbTriple parse_triple(const std::string& key, const RawEntry& e) {
    const std::vector<double> v = parse_double_list(key, e);
    if (v.size() != 3) {
        throw ConfigError("line " + std::to_string(e.line) + ": key '" + key +
                          "' expects 3 numbers");
    }
    return ProbTriple{v[0], v[1], v[2]};
}

EnvModel build_model(const std::map<std::string, RawEntry>& mk, int block_line) {
    const auto need = [&](const char* key) -> const RawEntry& {
        const auto it = mk.find(key);
        if (it == mk.end()) {
            throw ConfigError("model block at line " + std::to_string(block_line) +
                              ": missing key '" + key + "'");
        }
        return it->second;
    };
    const double floor = mk.count("floor") ? parse_double("floor", mk.at("floor")) : 0.0;
    const std::string kind = need("kind").value;

    const auto reject_extra = [&](std::initializer_list<const char*> allowed) {
        std::set<std::string> ok = {"kind", "floor"};
        for (const char* k : allowed) ok.insert(k);
        for (const auto& [k, v] : mk) {
            if (!ok.count(k)) {
                throw ConfigError("line " + std::to_string(v.line) + ": key '" + k +
                                  "' does not apply to model kind '" + kind + "'");
            }
        }
    };

    try {
        if (kind == "point_mass") {
            reject_extra({"triple"});
            return EnvModel::point_mass(parse_triple("triple", need("triple")), floor);
        }
        if (kind == "finite_mixture") {
            reject_extra({"atoms", "weights"});
            std::vector<ProbTriple> atoms;
            const RawEntry& raw = need("atoms");
            std::string part;
            std::istringstream in(raw.value);
            while (std::getline(in, part, '|')) {
                atoms.push_back(parse_triple("atoms", RawEntry{trim(part), raw.line}));
            }
            return EnvModel::finite_mixture(std::move(atoms),
                                            parse_double_list("weights", need("weights")), floor);
        }
        if (kind == "dirichlet_floor") {
            reject_extra({"alpha"});
            const std::vector<double> a = parse_double_list("alpha", need("alpha"));
            if (a.size() != 3) {
                throw ConfigError("line " + std::to_string(need("alpha").line) +
                                  ": key 'alpha' expects 3 numbers");
            }
            return EnvModel::dirichlet_floor({a[0], a[1], a[2]}, floor);
        }
    } catch (const InvariantViolationError& e) {
        throw ConfigError("model block at line " + std::to_string(block_line) +
                          ": invalid model: " + e.what());
    }
    throw ConfigError("line " + std::to_string(need("kind").line) + ": unknown model kind '" +
                      kind + "'");
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    std::map<std::string, RawEntry> top;
    std::map<std::string, RawEntry> model_keys;
    bool in_model = false;
    bool saw_model = false;
    int model_line = 0;

    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (!in_model && t == "model {") {
            if (saw_model) throw ConfigError("line " + std::to_string(lineno) +
                                             ": duplicate model block");
            in_model = true;
            saw_model = true;
            model_line = lineno;
            continue;
        }
        if (in_model && t == "}") {
            in_model = false;
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value', got '" +
                              t + "'");
        }
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key.empty() || value.empty()) {
            throw ConfigError("line " + std::to_string(lineno) + ": empty key or value");
        }
        auto& dest = in_model ? model_keys : top;
        if (dest.count(key)) {
            throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
        }
        dest[key] = RawEntry{value, lineno};
    }
    if (in_model) throw ConfigError("model block at line " + std::to_string(model_line) +
                                    " is not closed");

    const auto sub_it = top.find("subcommand");
    if (sub_it == top.end()) throw ConfigError("missing required key 'subcommand'");
    const std::string sub = sub_it->second.value;
    if (!kSubcommands.count(sub)) {
        throw ConfigError("line " + std::to_string(sub_it->second.line) +
                          ": unknown subcommand '" + sub + "'");
    }
    const std::set<std::string> allowed = keys_for(sub);
    for (const auto& [key, entry] : top) {
        if (!allowed.count(key)) {
            throw ConfigError("line " + std::to_string(entry.line) + ": unknown key '" + key +
                              "' for subcommand '" + sub + "'");
        }
    }
    if (!saw_model) throw ConfigError("missing model block");
    for (const auto& [key, entry] : model_keys) {
        if (!kModelKeys.count(key)) {
            throw ConfigError("line " + std::to_string(entry.line) + ": unknown model key '" +
                              key + "'");
        }
    }

    ExperimentConfig cfg;
    cfg.subcommand = sub;
    cfg.model = build_model(model_keys, model_line);
    if (top.count("seed")) cfg.seed = parse_uint("seed", top.at("seed"));
    if (top.count("output_dir")) cfg.output_dir = top.at("output_dir").value;
    if (top.count("n")) cfg.n = parse_int("n", top.at("n"));
    if (top.count("renorm_period")) {
        cfg.renorm_period = static_cast<int>(parse_int("renorm_period", top.at("renorm_period")));
    }
    if (top.count("n_batches")) {
        cfg.n_batches = static_cast<int>(parse_int("n_batches", top.at("n_batches")));
    }
    if (top.count("z")) cfg.z = parse_double("z", top.at("z"));
    if (top.count("replicas")) cfg.replicas = parse_uint("replicas", top.at("replicas"));
    if (top.count("x_max")) cfg.x_max = parse_int("x_max", top.at("x_max"));
    if (top.count("confirm_w")) cfg.confirm_w = parse_int("confirm_w", top.at("confirm_w"));
    if (top.count("confirm_c")) cfg.confirm_c = parse_int("confirm_c", top.at("confirm_c"));
    if (top.count("cap")) cfg.cap = parse_int("cap", top.at("cap"));
    if (top.count("n_grid")) cfg.n_grid = parse_int_list("n_grid", top.at("n_grid"));
    if (top.count("eta")) cfg.eta = parse_double("eta", top.at("eta"));

    // Subcommand defaults for anything not given.
    if (cfg.replicas == 0) {
        if (sub == "ld-rate" || sub == "identities") cfg.replicas = 10'000;
        if (sub == "tail") cfg.replicas = 100'000;
    }
    if (cfg.x_max == 0) cfg.x_max = sub == "renewals" ? 10'000 : 100'000;
    if (cfg.n_grid.empty()) {
        if (sub == "hitting") {
            for (std::int64_t i = 0; i <= 25; ++i) cfg.n_grid.push_back(i);
        } else if (sub == "tail") {
            for (std::int64_t i = 0; i <= 30; ++i) cfg.n_grid.push_back(i);
        }
    }
    if (cfg.cap == 0) {
        cfg.cap = std::max<std::int64_t>(1'000 * cfg.x_max, 10'000'000);
    }
    if (sub == "ld-rate") {
        if (!cfg.eta) throw ConfigError("subcommand 'ld-rate' requires key 'eta'");
        if (cfg.n_grid.empty()) throw ConfigError("subcommand 'ld-rate' requires key 'n_grid'");
    }
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

std::string fmt17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::string manifest_text(const ExperimentConfig& cfg) {
    std::ostringstream out;
    out << "subcommand = " << cfg.subcommand << "\n";
    out << "seed = " << cfg.seed << "\n";
    const std::string& sub = cfg.subcommand;
    if (sub == "classify" || sub == "lyapunov") {
        out << "n = " << cfg.n << "\n";
        out << "renorm_period = " << cfg.renorm_period << "\n";
        out << "n_batches = " << cfg.n_batches << "\n";
        out << "z = " << fmt17(cfg.z) << "\n";
    }
    if (sub == "ld-rate") {
        out << "eta = " << fmt17(*cfg.eta) << "\n";
        out << "replicas = " << cfg.replicas << "\n";
    }
    if (sub == "identities" || sub == "tail") out << "replicas = " << cfg.replicas << "\n";
    if (sub == "range" || sub == "renewals") {
        out << "x_max = " << cfg.x_max << "\n";
        out << "cap = " << cfg.cap << "\n";
    }
    if (sub == "range" || sub == "renewals" || sub == "identities") {
        out << "confirm_w = " << cfg.confirm_w << "\n";
    }
    if (sub == "tail") out << "confirm_c = " << cfg.confirm_c << "\n";
    if (sub == "ld-rate" || sub == "hitting" || sub == "tail") {
        out << "n_grid =";
        for (std::int64_t n : cfg.n_grid) out << " " << n;
        out << "\n";
    }
    out << "output_dir = " << cfg.output_dir << "\n";
    out << "model {\n";
    out << "    kind = ";
    switch (cfg.model.kind()) {
        case ModelKind::point_mass: {
            const ProbTriple& t = cfg.model.atoms()[0];
            out << "point_mass\n";
            out << "    triple = " << fmt17(t.left) << " " << fmt17(t.one) << " " << fmt17(t.two)
                << "\n";
            break;
        }
        case ModelKind::finite_mixture: {
            out << "finite_mixture\n";
            out << "    atoms =";
            for (std::size_t i = 0; i < cfg.model.atoms().size(); ++i) {
                const ProbTriple& t = cfg.model.atoms()[i];
                if (i > 0) out << " |";
                out << " " << fmt17(t.left) << " " << fmt17(t.one) << " " << fmt17(t.two);
            }
            out << "\n    weights =";
            for (double w : cfg.model.weights()) out << " " << fmt17(w);
            out << "\n";
            break;
        }
        case ModelKind::dirichlet_floor:
            out << "dirichlet_floor\n";
            out << "    alpha = " << fmt17(cfg.model.alpha()[0]) << " "
                << fmt17(cfg.model.alpha()[1]) << " " << fmt17(cfg.model.alpha()[2]) << "\n";
            break;
    }
    out << "    floor = " << fmt17(cfg.model.floor()) << "\n";
    out << "}\n";
    return out.str();
}

}  // namespace rwre
