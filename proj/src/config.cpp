// config.cpp - json parsing with unknown-key rejection, presets
#include "dicke/config.hpp"

#include <json.hpp>

#include <fstream>
#include <initializer_list>
#include <sstream>

namespace dicke {

namespace {

using json = nlohmann::ordered_json;

void reject_unknown(const json& o, const std::string& where,
                    std::initializer_list<const char*> keys) {
    for (const auto& [key, value] : o.items()) {
        bool known = false;
        for (const char* k : keys)
            if (key == k) {
                known = true;
                break;
            }
        if (!known) throw ConfigError("config: unknown key \"" + where + key + "\"");
    }
}

template <class T>
void read(const json& o, const char* key, T& into) {
    const auto it = o.find(key);
    if (it != o.end()) into = it->get<T>();
}

EpsWindow parse_window(const json& o, const std::string& where) {
    reject_unknown(o, where, {"center", "half_width"});
    EpsWindow w;
    read(o, "center", w.center);
    read(o, "half_width", w.half_width);
    return w;
}

json window_json(const EpsWindow& w) {
    return json{{"center", w.center}, {"half_width", w.half_width}};
}

RunConfig parse_json(const json& root) {
    reject_unknown(root, "", {"model", "basis", "windows", "stats", "classical", "husimi",
                              "classification", "seed", "workers", "out_dir"});
    RunConfig c;
    if (root.contains("model")) {
        const json& o = root.at("model");
        reject_unknown(o, "model.", {"omega", "omega0", "gamma", "j", "f"});
        read(o, "omega", c.model.omega);
        read(o, "omega0", c.model.omega0);
        read(o, "gamma", c.model.gamma);
        read(o, "j", c.model.j);
        read(o, "f", c.model.f);
    }
    if (root.contains("basis")) {
        const json& o = root.at("basis");
        reject_unknown(o, "basis.", {"kind", "truncation", "growth", "delta"});
        if (o.contains("kind")) {
            const auto kind = o.at("kind").get<std::string>();
            if (kind == "fock")
                c.basis = BasisKind::fock;
            else if (kind == "displaced")
                c.basis = BasisKind::displaced;
            else
                throw ConfigError("config: basis.kind must be \"fock\" or \"displaced\"");
        }
        read(o, "truncation", c.truncation);
        read(o, "growth", c.growth);
        read(o, "delta", c.delta);
    }
    if (root.contains("windows")) {
        const json& o = root.at("windows");
        reject_unknown(o, "windows.", {"analysis", "extra"});
        if (o.contains("analysis")) c.analysis = parse_window(o.at("analysis"), "windows.analysis.");
        if (o.contains("extra")) {
            c.extra_windows.clear();
            for (const json& w : o.at("extra"))
                c.extra_windows.push_back(parse_window(w, "windows.extra[]."));
        }
    }
    if (root.contains("stats")) {
        const json& o = root.at("stats");
        reject_unknown(o, "stats.", {"histogram_bins", "surrogate_levels"});
        read(o, "histogram_bins", c.histogram_bins);
        read(o, "surrogate_levels", c.surrogate_levels);
    }
    if (root.contains("classical")) {
        const json& o = root.at("classical");
        reject_unknown(o, "classical.",
                       {"grid_eps", "grid_n", "grid_span", "lyapunov_time", "renorm_dt",
                        "lambda_threshold", "ode_tol", "poincare_orbits", "poincare_time"});
        read(o, "grid_eps", c.grid_eps);
        read(o, "grid_n", c.grid_n);
        read(o, "grid_span", c.grid_span);
        read(o, "lyapunov_time", c.lyapunov_time);
        read(o, "renorm_dt", c.renorm_dt);
        read(o, "lambda_threshold", c.lambda_threshold);
        read(o, "ode_tol", c.ode_tol);
        read(o, "poincare_orbits", c.poincare_orbits);
        read(o, "poincare_time", c.poincare_time);
    }
    if (root.contains("husimi")) {
        const json& o = root.at("husimi");
        reject_unknown(o, "husimi.", {"moments", "shell_per_cell", "field_states"});
        read(o, "moments", c.moments);
        read(o, "shell_per_cell", c.shell_per_cell);
        read(o, "field_states", c.field_states);
    }
    if (root.contains("classification")) {
        const json& o = root.at("classification");
        reject_unknown(o, "classification.", {"band_lo", "band_hi", "ensembles", "scan"});
        read(o, "band_lo", c.bands.lo);
        read(o, "band_hi", c.bands.hi);
        read(o, "ensembles", c.ensembles);
        if (o.contains("scan")) {
            const json& s = o.at("scan");
            reject_unknown(s, "classification.scan.",
                           {"lo_min", "lo_max", "hi_min", "hi_max", "step", "min_width"});
            read(s, "lo_min", c.scan.lo_min);
            read(s, "lo_max", c.scan.lo_max);
            read(s, "hi_min", c.scan.hi_min);
            read(s, "hi_max", c.scan.hi_max);
            read(s, "step", c.scan.step);
            read(s, "min_width", c.scan.min_width);
        }
    }
    read(root, "seed", c.seed);
    read(root, "workers", c.workers);
    read(root, "out_dir", c.out_dir);
    return c;
}

}  // namespace

void RunConfig::validate() const {
    try {
        model.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    if (basis == BasisKind::displaced && model.f != 1)
        throw ConfigError("config: the displaced basis needs the one-photon coupling");
    if (truncation < 0) throw ConfigError("config: truncation must be nonnegative");
    if (!(growth > 1.0)) throw ConfigError("config: growth must exceed 1");
    if (!(delta > 0.0)) throw ConfigError("config: delta must be positive");
    if (!(analysis.half_width > 0.0)) throw ConfigError("config: analysis window has no width");
    for (const auto& w : extra_windows)
        if (!(w.half_width > 0.0)) throw ConfigError("config: extra window has no width");
    if (histogram_bins < 2) throw ConfigError("config: need at least 2 histogram bins");
    if (surrogate_levels < 100) throw ConfigError("config: surrogate ensemble too small");
    if (grid_n < 2) throw ConfigError("config: grid_n must be at least 2");
    if (!(grid_span > 0.0)) throw ConfigError("config: grid_span must be positive");
    if (!(lyapunov_time > 0.0) || !(renorm_dt > 0.0))
        throw ConfigError("config: integration times must be positive");
    if (!(ode_tol > 0.0)) throw ConfigError("config: ode_tol must be positive");
    if (poincare_orbits < 0 || !(poincare_time > 0.0))
        throw ConfigError("config: bad section settings");
    if (moments.empty()) throw ConfigError("config: moments list is empty");
    for (double nu : moments)
        if (!(nu > 0.0)) throw ConfigError("config: moments must be positive");
    if (shell_per_cell < 1) throw ConfigError("config: shell_per_cell must be at least 1");
    for (int k : field_states)
        if (k < 0) throw ConfigError("config: field_states indices must be nonnegative");
    if (!(bands.lo < bands.hi)) throw ConfigError("config: classification bands inverted");
    for (const auto& members : ensembles) {
        if (members.empty()) throw ConfigError("config: empty ensemble");
        for (double j : members)
            if (!(j > 0.0)) throw ConfigError("config: ensemble spins must be positive");
    }
    if (!(scan.step > 0.0) || !(scan.min_width > 0.0))
        throw ConfigError("config: scan grid needs positive step and width");
    if (seed == 0) throw ConfigError("config: seed must be nonzero");
    if (workers < 1) throw ConfigError("config: workers must be at least 1");
    if (out_dir.empty()) throw ConfigError("config: out_dir is empty");
}

RunConfig preset_config(const std::string& name) {
    RunConfig c;
    std::vector<double> small, large;
    for (int j = 20; j <= 30; ++j) small.push_back(j);
    for (int j = 49; j <= 51; ++j) large.push_back(j);
    c.ensembles = {small, large};
    if (name == "one-photon-paper") {
        c.model = {1.0, 1.0, 0.5, 50.0, 1};
        c.basis = BasisKind::displaced;
        c.analysis = {0.0, 0.05};
        c.extra_windows = {{-0.9, 0.1}, {3.0, 0.1}};
        c.grid_eps = {0.0};
        c.bands = default_bands(1);
        c.scan = {-0.80, 0.45, c.bands.hi, c.bands.hi, 0.05, 0.2};
        return c;
    }
    if (name == "two-photon-paper") {
        c.model = {1.0, 2.0, 0.3, 50.0, 2};
        c.basis = BasisKind::fock;
        c.analysis = {1.0, 0.05};
        c.extra_windows = {{1.0, 0.1}};
        c.grid_eps = {1.0};
        c.bands = default_bands(2);
        c.scan = {-0.80, 0.60, c.bands.hi, c.bands.hi, 0.05, 0.2};
        return c;
    }
    throw ConfigError("config: unknown preset \"" + name + "\"");
}

RunConfig parse_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    if (!root.is_object()) throw ConfigError("config: top level must be an object");
    try {
        return parse_json(root);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

RunConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("config: cannot open " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse_config(ss.str());
}

std::string dump_config(const RunConfig& c) {
    json root;
    root["model"] = {{"omega", c.model.omega},
                     {"omega0", c.model.omega0},
                     {"gamma", c.model.gamma},
                     {"j", c.model.j},
                     {"f", c.model.f}};
    root["basis"] = {{"kind", c.basis == BasisKind::displaced ? "displaced" : "fock"},
                     {"truncation", c.truncation},
                     {"growth", c.growth},
                     {"delta", c.delta}};
    json extra = json::array();
    for (const auto& w : c.extra_windows) extra.push_back(window_json(w));
    root["windows"] = {{"analysis", window_json(c.analysis)}, {"extra", extra}};
    root["stats"] = {{"histogram_bins", c.histogram_bins},
                     {"surrogate_levels", c.surrogate_levels}};
    root["classical"] = {{"grid_eps", c.grid_eps},
                         {"grid_n", c.grid_n},
                         {"grid_span", c.grid_span},
                         {"lyapunov_time", c.lyapunov_time},
                         {"renorm_dt", c.renorm_dt},
                         {"lambda_threshold", c.lambda_threshold},
                         {"ode_tol", c.ode_tol},
                         {"poincare_orbits", c.poincare_orbits},
                         {"poincare_time", c.poincare_time}};
    root["husimi"] = {{"moments", c.moments},
                      {"shell_per_cell", c.shell_per_cell},
                      {"field_states", c.field_states}};
    root["classification"] = {{"band_lo", c.bands.lo},
                              {"band_hi", c.bands.hi},
                              {"ensembles", c.ensembles},
                              {"scan",
                               {{"lo_min", c.scan.lo_min},
                                {"lo_max", c.scan.lo_max},
                                {"hi_min", c.scan.hi_min},
                                {"hi_max", c.scan.hi_max},
                                {"step", c.scan.step},
                                {"min_width", c.scan.min_width}}}};
    root["seed"] = c.seed;
    root["workers"] = c.workers;
    root["out_dir"] = c.out_dir;
    return root.dump(2) + "\n";
}

}  // namespace dicke
