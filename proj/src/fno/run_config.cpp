#include "fno/run_config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

extern "C" char** environ;

namespace fno {

const std::map<std::string, std::string>& RunConfig::schema() {
    static const std::map<std::string, std::string> defaults = {
        // dataset generation
        {"data.kind", "burgers"},
        {"data.n_train", "1000"},
        {"data.n_test", "200"},
        {"data.resolution", "1024"},
        {"data.companions", ""}, // extra output resolutions, comma separated

        // Gaussian random field measure
        {"grf.scale", "625.0"},
        {"grf.tau", "25.0"},
        {"grf.alpha", "2.0"},
        {"grf.boundary", "periodic"},     // periodic | neumann
        {"grf.pushforward", "none"},      // none | threshold
        {"grf.push_threshold", "0.0"},
        {"grf.push_above", "12.0"},
        {"grf.push_below", "3.0"},

        // solvers
        {"burgers.nu", "0.1"},
        {"burgers.t_final", "1.0"},
        {"burgers.dt_max", "1e-4"},
        {"burgers.cfl", "0.5"},
        {"darcy.forcing", "1.0"},
        {"darcy.harmonic_faces", "false"},
        {"darcy.cg_tol", "1e-8"},
        {"darcy.cg_max_iter", "0"},
        {"ns.nu", "1e-3"},
        {"ns.t_final", "20.0"},
        {"ns.dt", "1e-3"},
        {"ns.record_interval", "1.0"},
        {"ns.forcing", "standard"},       // standard | none
        {"ns.cfl_limit", "1.0"},

        // model architecture
        {"model.variant", "fno1d"},
        {"model.width", "64"},
        {"model.kmax", "16"},
        {"model.layers", "4"},
        {"model.batch_norm", "true"},
        {"model.q_hidden", "128"},
        {"model.rnn_window", "10"},
        {"model.horizon", "10"},
        {"model.grid", "torus"},          // torus | box

        // training
        {"train.epochs", "500"},
        {"train.batch", "20"},
        {"train.lr", "1e-3"},
        {"train.halve_every", "100"},
        {"train.window_stride", "1"},
        {"train.divergence_limit", "1e3"},

        // Bayesian inversion
        {"mcmc.beta", "0.05"},
        {"mcmc.samples", "2000"},
        {"mcmc.burn_in", "500"},
        {"mcmc.thin", "10"},
        {"mcmc.t_obs", "20.0"},
        {"mcmc.obs_grid", "7"},
        {"mcmc.sigma_noise", "0.0"},      // 0 -> 0.1 * RMS of the true observations
        {"mcmc.forward", "solver"},       // solver | surrogate
        {"mcmc.surrogate_checkpoint", ""},
        {"mcmc.dt", "2e-2"},              // solver step inside the chain
        {"mcmc.push_mean_forward", "true"},

        // process-level
        {"run.seed", "0"},
        {"run.threads", "1"},
        {"run.out", "."},
    };
    return defaults;
}

RunConfig::RunConfig() : values_(schema()) {}

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

} // namespace

void RunConfig::load_file(const std::string& path) {
    std::ifstream f(path);
    FNO_REQUIRE(f.good(), UsageError, "cannot open config file '", path, "'");
    std::stringstream ss;
    ss << f.rdbuf();
    load_text(ss.str(), path);
}

void RunConfig::load_text(const std::string& text, const std::string& origin) {
    std::istringstream is(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            FNO_REQUIRE(t.back() == ']', UsageError, origin, ":", lineno, ":", line.size(),
                        ": unterminated section header");
            section = trim(t.substr(1, t.size() - 2));
            continue;
        }
        size_t eq = t.find('=');
        FNO_REQUIRE(eq != std::string::npos, UsageError, origin, ":", lineno, ":1: expected key=value");
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        FNO_REQUIRE(!section.empty(), UsageError, origin, ":", lineno, ":1: key '", key,
                    "' outside of any [section]");
        std::string full = section + "." + key;
        size_t col = line.find(key) + 1;
        FNO_REQUIRE(values_.count(full), UsageError, origin, ":", lineno, ":", col,
                    ": unknown key '", full, "'");
        values_[full] = value;
    }
}

void RunConfig::apply_env(const char* prefix) {
    std::string pre(prefix);
    for (char** e = environ; *e != nullptr; ++e) {
        std::string entry(*e);
        if (entry.rfind(pre, 0) != 0) continue;
        size_t eq = entry.find('=');
        if (eq == std::string::npos) continue;
        std::string name = entry.substr(pre.size(), eq - pre.size());
        std::string value = entry.substr(eq + 1);
        // FNO_TRAIN_EPOCHS -> train.epochs
        size_t us = name.find('_');
        if (us == std::string::npos) continue;
        std::string key = name.substr(0, us) + "." + name.substr(us + 1);
        std::transform(key.begin(), key.end(), key.begin(),
                       [](unsigned char c) { return std::tolower(c); });
        if (values_.count(key)) values_[key] = value;
    }
}

void RunConfig::set(const std::string& key, const std::string& value) {
    FNO_REQUIRE(values_.count(key), UsageError, "unknown config key '", key, "'");
    values_[key] = value;
}

void RunConfig::apply_kind_preset(const std::string& kind) {
    if (kind == "burgers") {
        set("data.kind", "burgers");
        set("data.resolution", "1024");
        set("grf.scale", "625.0");
        set("grf.tau", "25.0");
        set("grf.alpha", "2.0");
        set("grf.boundary", "periodic");
        set("grf.pushforward", "none");
        set("model.variant", "fno1d");
        set("model.width", "64");
        set("model.kmax", "16");
        set("model.grid", "torus");
    } else if (kind == "darcy") {
        set("data.kind", "darcy");
        set("data.resolution", "129");
        set("grf.scale", "1.0");
        set("grf.tau", "9.0");
        set("grf.alpha", "2.0");
        set("grf.boundary", "neumann");
        set("grf.pushforward", "threshold");
        set("model.variant", "fno2d");
        set("model.width", "32");
        set("model.kmax", "12,12");
        set("model.grid", "box");
    } else if (kind == "ns") {
        set("data.kind", "ns");
        set("data.resolution", "64");
        set("grf.scale", "18.520259177452136"); // 7^(3/2)
        set("grf.tau", "49.0");
        set("grf.alpha", "2.5");
        set("grf.boundary", "periodic");
        set("grf.pushforward", "none");
        set("model.variant", "fno2d-rnn");
        set("model.width", "32");
        set("model.kmax", "12,12");
        set("model.grid", "torus");
    } else {
        throw UsageError(concat("unknown problem kind '", kind, "' (burgers|darcy|ns)"));
    }
}

const std::string& RunConfig::get(const std::string& key) const {
    auto it = values_.find(key);
    FNO_REQUIRE(it != values_.end(), UsageError, "unknown config key '", key, "'");
    return it->second;
}

int64_t RunConfig::get_i64(const std::string& key) const {
    try {
        size_t used = 0;
        int64_t v = std::stoll(get(key), &used);
        FNO_REQUIRE(used == get(key).size(), UsageError, "");
        return v;
    } catch (const std::exception&) {
        throw UsageError(concat("config key '", key, "' = '", get(key), "' is not an integer"));
    }
}

double RunConfig::get_f64(const std::string& key) const {
    try {
        size_t used = 0;
        double v = std::stod(get(key), &used);
        FNO_REQUIRE(used == get(key).size(), UsageError, "");
        return v;
    } catch (const std::exception&) {
        throw UsageError(concat("config key '", key, "' = '", get(key), "' is not a number"));
    }
}

bool RunConfig::get_bool(const std::string& key) const {
    const std::string& v = get(key);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw UsageError(concat("config key '", key, "' = '", v, "' is not a boolean"));
}

std::vector<int64_t> RunConfig::get_i64_list(const std::string& key) const {
    std::vector<int64_t> out;
    std::istringstream is(get(key));
    std::string tok;
    while (std::getline(is, tok, ',')) {
        tok = trim(tok);
        if (tok.empty()) continue;
        try {
            out.push_back(std::stoll(tok));
        } catch (const std::exception&) {
            throw UsageError(concat("config key '", key, "': '", tok, "' is not an integer"));
        }
    }
    return out;
}

std::string RunConfig::canonical_text() const {
    // execution-level keys (seed, threads, output dir) do not change the
    // experiment's identity; sidecars record the seed separately
    std::string out;
    for (const auto& [k, v] : values_) {
        if (k.rfind("run.", 0) == 0) continue;
        out += k;
        out += "=";
        out += v;
        out += "\n";
    }
    return out;
}

uint64_t RunConfig::hash() const {
    // FNV-1a
    uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : canonical_text()) {
        h ^= static_cast<uint8_t>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace fno
