#include "twomode/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "twomode/errors.hpp"

namespace twomode {

using nlohmann::json;

std::uint64_t fnv1a(const std::string& data) {
    std::uint64_t h = 14695981039346656037ull;
    for (const unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string fnv1a_hex(const std::string& data) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)fnv1a(data));
    return buf;
}

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
    throw InvalidParameterError("config " + path + ": " + msg);
}

double get_num(const json& obj, const std::string& path, const std::string& key) {
    if (!obj.at(key).is_number()) fail(path + "." + key, "expected a number");
    return obj.at(key).get<double>();
}

// Every physical key must carry a unit suffix; bare physical names are
// rejected so unitless numbers cannot sneak in.
void check_keys(const json& obj, const std::string& path,
                const std::vector<std::string>& allowed) {
    for (const auto& [key, value] : obj.items()) {
        bool ok = false;
        for (const std::string& a : allowed) ok = ok || a == key;
        if (!ok) {
            std::ostringstream msg;
            msg << "unknown key '" << key << "' (allowed:";
            for (const std::string& a : allowed) msg << ' ' << a;
            msg << "); physical quantities must carry their unit in the key";
            fail(path, msg.str());
        }
    }
}

}  // namespace

RunConfig parse_config_text(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw InvalidParameterError(std::string("config parse error: ") + e.what());
    }
    if (!root.is_object()) throw InvalidParameterError("config root must be an object");

    check_keys(root, "$",
               {"device", "charge", "experiment", "noise", "scenario", "geometry",
                "sweep", "localize", "map", "mode", "out_dir", "seed", "cutoff"});

    RunConfig cfg;
    cfg.config_hash = fnv1a_hex(root.dump());

    if (root.contains("device")) {
        const json& d = root["device"];
        check_keys(d, "device", {"ej1_GHz", "ej2_GHz", "ec_GHz", "ep_GHz", "c_fF", "cm_fF"});
        if (d.contains("c_fF") || d.contains("cm_fF")) {
            if (d.contains("ec_GHz") || d.contains("ep_GHz")) {
                fail("device", "give either capacitances or charging energies, not both");
            }
            const auto [ec, ep] =
                derive_energies(get_num(d, "device", "c_fF"), get_num(d, "device", "cm_fF"));
            cfg.device.ec = ec;
            cfg.device.ep = ep;
        } else {
            if (d.contains("ec_GHz")) cfg.device.ec = get_num(d, "device", "ec_GHz");
            if (d.contains("ep_GHz")) cfg.device.ep = get_num(d, "device", "ep_GHz");
        }
        if (d.contains("ej1_GHz")) cfg.device.ej1 = get_num(d, "device", "ej1_GHz");
        if (d.contains("ej2_GHz")) cfg.device.ej2 = get_num(d, "device", "ej2_GHz");
        cfg.device.validate();
    }

    if (root.contains("charge")) {
        const json& c = root["charge"];
        check_keys(c, "charge", {"ng_sigma", "ng_delta"});
        const double ngs = c.contains("ng_sigma") ? get_num(c, "charge", "ng_sigma") : 0.0;
        const double ngd = c.contains("ng_delta") ? get_num(c, "charge", "ng_delta") : 0.0;
        cfg.charge = ChargeConfig::from_sum_diff(ngs, ngd);
    }

    int n_delays = 400;
    double span_us = 20.0;
    if (root.contains("experiment")) {
        const json& e = root["experiment"];
        check_keys(e, "experiment",
                   {"detuning_MHz", "shots", "n_delays", "span_us", "t2_us",
                    "acquisition_ms_per_delay", "noiseless"});
        if (e.contains("detuning_MHz"))
            cfg.experiment.detuning_MHz = get_num(e, "experiment", "detuning_MHz");
        if (e.contains("shots")) cfg.experiment.shots = int(get_num(e, "experiment", "shots"));
        if (e.contains("n_delays")) n_delays = int(get_num(e, "experiment", "n_delays"));
        if (e.contains("span_us")) span_us = get_num(e, "experiment", "span_us");
        if (e.contains("t2_us")) cfg.experiment.t2_us = get_num(e, "experiment", "t2_us");
        if (e.contains("acquisition_ms_per_delay")) {
            cfg.experiment.acquisition_ms_per_delay =
                get_num(e, "experiment", "acquisition_ms_per_delay");
        }
        if (e.contains("noiseless")) cfg.experiment.noiseless = e["noiseless"].get<bool>();
    }
    cfg.experiment.delays_us = uniform_delays(n_delays, span_us);
    cfg.experiment.validate();

    if (root.contains("noise")) {
        const json& n = root["noise"];
        check_keys(n, "noise",
                   {"qp_rate_per_us", "drift_sigma_per_sqrt_min", "drift_model",
                    "ou_tau_min_minutes", "ou_decades"});
        if (n.contains("qp_rate_per_us"))
            cfg.noise.qp_rate_per_us = get_num(n, "noise", "qp_rate_per_us");
        if (n.contains("drift_sigma_per_sqrt_min")) {
            cfg.noise.drift_sigma_per_sqrt_min =
                get_num(n, "noise", "drift_sigma_per_sqrt_min");
        }
        if (n.contains("drift_model")) {
            const std::string m = n["drift_model"].get<std::string>();
            if (m == "random_walk") cfg.noise.drift = DriftKind::RandomWalk;
            else if (m == "ou_sum") cfg.noise.drift = DriftKind::OuSum;
            else fail("noise.drift_model", "expected random_walk or ou_sum");
        }
        if (n.contains("ou_tau_min_minutes"))
            cfg.noise.ou_tau_min_minutes = get_num(n, "noise", "ou_tau_min_minutes");
        if (n.contains("ou_decades"))
            cfg.noise.ou_decades = int(get_num(n, "noise", "ou_decades"));
        cfg.noise.validate();
    }

    if (root.contains("scenario")) {
        const json& s = root["scenario"];
        check_keys(s, "scenario",
                   {"duration_min", "cadence_min", "eps_GHz", "spatial", "waypoints"});
        if (s.contains("duration_min"))
            cfg.scenario.duration_min = get_num(s, "scenario", "duration_min");
        if (s.contains("cadence_min"))
            cfg.scenario.cadence_min = get_num(s, "scenario", "cadence_min");
        if (s.contains("eps_GHz")) cfg.scenario.eps = get_num(s, "scenario", "eps_GHz");
        if (s.contains("spatial")) cfg.scenario.spatial = s["spatial"].get<bool>();
        if (s.contains("waypoints")) {
            for (const json& w : s["waypoints"]) {
                Waypoint wp;
                if (cfg.scenario.spatial) {
                    check_keys(w, "scenario.waypoints[]", {"time_min", "x_um", "y_um", "q_e"});
                    wp.time_min = get_num(w, "waypoint", "time_min");
                    wp.a = get_num(w, "waypoint", "x_um");
                    wp.b = get_num(w, "waypoint", "y_um");
                    wp.q = w.contains("q_e") ? get_num(w, "waypoint", "q_e") : 1.0;
                } else {
                    check_keys(w, "scenario.waypoints[]",
                               {"time_min", "ng_sigma", "ng_delta"});
                    wp.time_min = get_num(w, "waypoint", "time_min");
                    wp.a = get_num(w, "waypoint", "ng_sigma");
                    wp.b = get_num(w, "waypoint", "ng_delta");
                }
                cfg.scenario.waypoints.push_back(wp);
            }
        }
        cfg.scenario.validate();
    }

    if (root.contains("geometry")) {
        const json& g = root["geometry"];
        check_keys(g, "geometry",
                   {"inner_radius_um", "gap_um", "annulus_inner_um", "annulus_outer_um"});
        if (g.contains("inner_radius_um"))
            cfg.geometry.inner_radius_um = get_num(g, "geometry", "inner_radius_um");
        if (g.contains("gap_um")) cfg.geometry.gap_um = get_num(g, "geometry", "gap_um");
        if (g.contains("annulus_inner_um"))
            cfg.geometry.annulus_inner_um = get_num(g, "geometry", "annulus_inner_um");
        if (g.contains("annulus_outer_um"))
            cfg.geometry.annulus_outer_um = get_num(g, "geometry", "annulus_outer_um");
        cfg.geometry.validate();
    }

    if (root.contains("sweep")) {
        const json& s = root["sweep"];
        check_keys(s, "sweep", {"ratio_min", "ratio_max", "n_points", "ep_over_ec"});
        if (s.contains("ratio_min")) cfg.sweep.ratio_min = get_num(s, "sweep", "ratio_min");
        if (s.contains("ratio_max")) cfg.sweep.ratio_max = get_num(s, "sweep", "ratio_max");
        if (s.contains("n_points")) cfg.sweep.n_points = int(get_num(s, "sweep", "n_points"));
        if (s.contains("ep_over_ec"))
            cfg.sweep.ep_over_ec = get_num(s, "sweep", "ep_over_ec");
        if (cfg.sweep.n_points < 1) fail("sweep.n_points", "must be >= 1");
        if (cfg.sweep.ratio_max < cfg.sweep.ratio_min) fail("sweep", "empty ratio range");
    }

    if (root.contains("localize")) {
        const json& l = root["localize"];
        check_keys(l, "localize", {"ng_sigma", "ng_delta", "sigma", "q_assumed"});
        if (l.contains("ng_sigma")) cfg.localize.ng_sigma = get_num(l, "localize", "ng_sigma");
        if (l.contains("ng_delta")) cfg.localize.ng_delta = get_num(l, "localize", "ng_delta");
        if (l.contains("sigma")) cfg.localize.sigma = get_num(l, "localize", "sigma");
        if (l.contains("q_assumed")) cfg.localize.q_assumed = get_num(l, "localize", "q_assumed");
    }

    if (root.contains("map")) {
        const json& m = root["map"];
        check_keys(m, "map", {"source", "path", "half_um", "n"});
        if (m.contains("source")) cfg.map_source = m["source"].get<std::string>();
        if (cfg.map_source != "surrogate" && cfg.map_source != "file") {
            fail("map.source", "expected surrogate or file");
        }
        if (m.contains("path")) cfg.map_path = m["path"].get<std::string>();
        if (cfg.map_source == "file") {
            if (cfg.map_path.empty()) fail("map.path", "required for a file map source");
            if (!std::filesystem::exists(cfg.map_path)) {
                fail("map.path", "file does not exist: " + cfg.map_path);
            }
        }
        if (m.contains("half_um")) cfg.map_half_um = get_num(m, "map", "half_um");
        if (m.contains("n")) cfg.map_n = int(get_num(m, "map", "n"));
    }

    if (root.contains("mode")) {
        const std::string m = root["mode"].get<std::string>();
        if (m == "sigma") cfg.mode = RamseyMode::Sigma;
        else if (m == "delta") cfg.mode = RamseyMode::Delta;
        else if (m == "cross-kerr") cfg.mode = RamseyMode::CrossKerr;
        else fail("mode", "expected sigma, delta or cross-kerr");
    }
    if (root.contains("out_dir")) cfg.out_dir = root["out_dir"].get<std::string>();
    if (root.contains("seed")) cfg.seed = root["seed"].get<std::uint64_t>();
    if (root.contains("cutoff")) cfg.cutoff = int(get_num(root, "$", "cutoff"));

    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

SensitivityMap config_map(const RunConfig& cfg) {
    if (cfg.map_source == "file") return load_map(cfg.map_path);
    return surrogate_map(cfg.geometry, GridSpec::centered(cfg.map_half_um, cfg.map_n));
}

void Table::add_row(std::vector<std::string> row) {
    if (row.size() != columns.size()) {
        throw InvalidParameterError("table '" + name + "' row width mismatch");
    }
    rows.push_back(std::move(row));
}

std::string Table::num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

const Table* ResultBundle::table(const std::string& name) const {
    for (const Table& t : tables) {
        if (t.name == name) return &t;
    }
    return nullptr;
}

void ResultBundle::write(const std::string& dir) const {
    std::filesystem::create_directories(dir);
    for (const Table& t : tables) {
        std::ofstream out(std::filesystem::path(dir) / (t.name + ".tsv"));
        if (!out) throw IoError("cannot write table " + t.name + " in " + dir);
        for (size_t c = 0; c < t.columns.size(); ++c) {
            out << (c ? "\t" : "") << t.columns[c];
        }
        out << "\n";
        for (const std::vector<std::string>& row : t.rows) {
            for (size_t c = 0; c < row.size(); ++c) out << (c ? "\t" : "") << row[c];
            out << "\n";
        }
    }
    json meta;
    meta["command"] = command;
    meta["config_hash"] = config_hash;
    meta["seed"] = seed;
    meta["version"] = kVersion;
    meta["metrics"] = metrics;
    meta["info"] = info;
    std::ofstream out(std::filesystem::path(dir) / "metrics.json");
    if (!out) throw IoError("cannot write metrics.json in " + dir);
    out << meta.dump(2) << "\n";
}

}  // namespace twomode
