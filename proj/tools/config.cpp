#include "config.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

namespace mcfar::cli {

using nlohmann::json;

namespace {

void check_keys(const json& j, const std::string& path, const std::set<std::string>& allowed) {
    if (!j.is_object()) throw ConfigError(path + ": expected an object");
    for (const auto& [key, value] : j.items()) {
        if (!allowed.count(key)) throw ConfigError(path + "." + key + ": unknown key");
    }
}

template <typename T>
void read(const json& j, const char* key, const std::string& path, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(path + "." + key + ": wrong type");
    }
}

void read_interference(const json& j, const std::string& path,
                       std::optional<InterferenceSpec>& out) {
    if (!j.contains("interference")) return;
    const json& blk = j.at("interference");
    if (blk.is_null()) {
        out.reset();
        return;
    }
    check_keys(blk, path + ".interference", {"fi", "inr_db", "count"});
    InterferenceSpec spec = out.value_or(InterferenceSpec{});
    read(blk, "fi", path + ".interference", spec.fi);
    read(blk, "inr_db", path + ".interference", spec.inr_db);
    read(blk, "count", path + ".interference", spec.count);
    out = spec;
}

void read_clutter(const json& j, const std::string& path, ClutterParams& out) {
    if (!j.contains("clutter")) return;
    const json& blk = j.at("clutter");
    check_keys(blk, path + ".clutter",
               {"cnr_db", "rho", "fc", "shape_alpha", "scale_beta", "texture"});
    read(blk, "cnr_db", path + ".clutter", out.cnr_db);
    read(blk, "rho", path + ".clutter", out.rho);
    read(blk, "fc", path + ".clutter", out.fc);
    read(blk, "shape_alpha", path + ".clutter", out.shape_alpha);
    read(blk, "scale_beta", path + ".clutter", out.scale_beta);
    read(blk, "texture", path + ".clutter", out.texture_on);
}

std::vector<double> default_fd_grid() {
    std::vector<double> grid;
    for (int k = 0; k < 21; ++k) grid.push_back(k / 21.0);
    return grid;
}

}  // namespace

RunConfig preset(const std::string& name) {
    RunConfig cfg;
    cfg.scenario.fd_grid = default_fd_grid();
    if (name == "desk") return cfg;
    if (name == "paper") {
        cfg.scenario.pfa = 1e-3;
        cfg.scenario.calib_trials = 100000;  // 100 / pfa
        cfg.scenario.trials_pd = 2000;
        cfg.scenario.detectors = {"amf",           "anmf",           "mcfar:airm:mean",
                                  "mcfar:airm:median", "mcfar:le:mean", "mcfar:le:median",
                                  "mcfar:bw:mean", "mcfar:bw:median"};
        cfg.influence.repeats = 1000;
        cfg.influence.n_range.clear();
        for (int n = 1; n <= 40; ++n) cfg.influence.n_range.push_back(n);
        return cfg;
    }
    throw ConfigError("unknown preset '" + name + "' (expected desk or paper)");
}

RunConfig parse_config(const json& doc, RunConfig base) {
    if (!doc.is_object()) throw ConfigError("config: top level must be an object");
    check_keys(doc, "config", {"seed", "workers", "scenario", "solver", "bench", "influence"});
    read(doc, "seed", "config", base.seed);
    read(doc, "workers", "config", base.workers);

    if (doc.contains("scenario")) {
        const json& s = doc.at("scenario");
        const std::string p = "config.scenario";
        check_keys(s, p, {"N", "m", "m_mismatch", "clutter", "fd", "steering_draw_seed",
                          "interference", "pfa", "calib_trials", "trials_pd", "detectors",
                          "scr_grid_db", "fd_grid", "theta_grid_deg", "scr_db_fixed"});
        read(s, "N", p, base.scenario.N);
        read(s, "m", p, base.scenario.m);
        read(s, "m_mismatch", p, base.scenario.m_mismatch);
        read_clutter(s, p, base.scenario.clutter);
        read(s, "fd", p, base.scenario.fd);
        read(s, "steering_draw_seed", p, base.scenario.steering_draw_seed);
        read_interference(s, p, base.scenario.interference);
        read(s, "pfa", p, base.scenario.pfa);
        read(s, "calib_trials", p, base.scenario.calib_trials);
        read(s, "trials_pd", p, base.scenario.trials_pd);
        read(s, "detectors", p, base.scenario.detectors);
        read(s, "scr_grid_db", p, base.scenario.scr_grid_db);
        read(s, "fd_grid", p, base.scenario.fd_grid);
        read(s, "theta_grid_deg", p, base.scenario.theta_grid_deg);
        read(s, "scr_db_fixed", p, base.scenario.scr_db_fixed);
    }
    if (doc.contains("solver")) {
        const json& s = doc.at("solver");
        check_keys(s, "config.solver", {"tol", "max_iter"});
        read(s, "tol", "config.solver", base.solver.tol);
        read(s, "max_iter", "config.solver", base.solver.max_iter);
    }
    if (doc.contains("bench")) {
        const json& s = doc.at("bench");
        check_keys(s, "config.bench", {"count_m", "N", "tol"});
        read(s, "count_m", "config.bench", base.bench.count_m);
        read(s, "N", "config.bench", base.bench.N);
        read(s, "tol", "config.bench", base.bench.tol);
    }
    if (doc.contains("influence")) {
        const json& s = doc.at("influence");
        check_keys(s, "config.influence",
                   {"m", "n_range", "repeats", "scr_db", "averaging", "redraw_clean"});
        read(s, "m", "config.influence", base.influence.m);
        read(s, "n_range", "config.influence", base.influence.n_range);
        read(s, "repeats", "config.influence", base.influence.repeats);
        read(s, "scr_db", "config.influence", base.influence.scr_db);
        read(s, "averaging", "config.influence", base.influence.averaging);
        read(s, "redraw_clean", "config.influence", base.influence.redraw_clean);
    }

    for (const auto& name : base.scenario.detectors) DetectorSpec::from_name(name);
    for (const auto& pair : base.influence.averaging) parse_averaging_pair(pair);
    return base;
}

RunConfig load_config_file(const std::string& path, RunConfig base) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ConfigError("config file '" + path + "': " + e.what());
    }
    return parse_config(doc, std::move(base));
}

json to_json(const RunConfig& cfg) {
    json j;
    j["seed"] = cfg.seed;
    j["workers"] = cfg.workers;
    json s;
    s["N"] = cfg.scenario.N;
    s["m"] = cfg.scenario.m;
    s["m_mismatch"] = cfg.scenario.m_mismatch;
    s["clutter"] = {{"cnr_db", cfg.scenario.clutter.cnr_db},
                    {"rho", cfg.scenario.clutter.rho},
                    {"fc", cfg.scenario.clutter.fc},
                    {"shape_alpha", cfg.scenario.clutter.shape_alpha},
                    {"scale_beta", cfg.scenario.clutter.scale_beta},
                    {"texture", cfg.scenario.clutter.texture_on}};
    s["fd"] = cfg.scenario.fd;
    s["steering_draw_seed"] = cfg.scenario.steering_draw_seed;
    if (cfg.scenario.interference) {
        s["interference"] = {{"fi", cfg.scenario.interference->fi},
                             {"inr_db", cfg.scenario.interference->inr_db},
                             {"count", cfg.scenario.interference->count}};
    } else {
        s["interference"] = nullptr;
    }
    s["pfa"] = cfg.scenario.pfa;
    s["calib_trials"] = cfg.scenario.calib_trials;
    s["trials_pd"] = cfg.scenario.trials_pd;
    s["detectors"] = cfg.scenario.detectors;
    s["scr_grid_db"] = cfg.scenario.scr_grid_db;
    s["fd_grid"] = cfg.scenario.fd_grid;
    s["theta_grid_deg"] = cfg.scenario.theta_grid_deg;
    s["scr_db_fixed"] = cfg.scenario.scr_db_fixed;
    j["scenario"] = s;
    j["solver"] = {{"tol", cfg.solver.tol}, {"max_iter", cfg.solver.max_iter}};
    j["bench"] = {{"count_m", cfg.bench.count_m}, {"N", cfg.bench.N}, {"tol", cfg.bench.tol}};
    j["influence"] = {{"m", cfg.influence.m},
                      {"n_range", cfg.influence.n_range},
                      {"repeats", cfg.influence.repeats},
                      {"scr_db", cfg.influence.scr_db},
                      {"averaging", cfg.influence.averaging},
                      {"redraw_clean", cfg.influence.redraw_clean}};
    return j;
}

std::string config_hash(const RunConfig& cfg) {
    const std::string dump = to_json(cfg).dump();
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : dump) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

std::pair<MetricKind, Statistic> parse_averaging_pair(const std::string& pair) {
    const auto colon = pair.find(':');
    if (colon == std::string::npos)
        throw ConfigError("averaging pair '" + pair + "' must look like 'bw:mean'");
    try {
        return {metric_from_name(pair.substr(0, colon)),
                statistic_from_name(pair.substr(colon + 1))};
    } catch (const InvalidInput& e) {
        throw ConfigError("averaging pair '" + pair + "': " + e.what());
    }
}

ScenarioConfig make_scenario(const RunConfig& cfg, SweepKind sweep) {
    ScenarioConfig sc;
    sc.N = cfg.scenario.N;
    sc.m = sweep == SweepKind::Mismatch ? cfg.scenario.m_mismatch : cfg.scenario.m;
    sc.clutter = cfg.scenario.clutter;
    sc.clutter.N = cfg.scenario.N;
    if (sweep == SweepKind::Mismatch) {
        sc.steering =
            SteeringSpec::mismatched(cfg.scenario.N, 0.0, cfg.scenario.steering_draw_seed);
    } else {
        sc.steering = SteeringSpec::ideal(cfg.scenario.N, cfg.scenario.fd);
    }
    sc.interference = cfg.scenario.interference;
    sc.pfa = cfg.scenario.pfa;
    sc.calib_trials = cfg.scenario.calib_trials;
    sc.trials_pd = cfg.scenario.trials_pd;
    for (const auto& name : cfg.scenario.detectors)
        sc.detectors.push_back(DetectorSpec::from_name(name));
    switch (sweep) {
        case SweepKind::Scr: sc.scr_grid_db = cfg.scenario.scr_grid_db; break;
        case SweepKind::Fd: sc.fd_grid = cfg.scenario.fd_grid; break;
        case SweepKind::Mismatch: sc.theta_grid_deg = cfg.scenario.theta_grid_deg; break;
    }
    sc.scr_db_fixed = cfg.scenario.scr_db_fixed;
    sc.master_seed = cfg.seed;
    sc.solver.tol = cfg.solver.tol;
    sc.solver.max_iter = cfg.solver.max_iter;
    sc.workers = cfg.workers;
    return sc;
}

ContaminationSpec make_contamination(const RunConfig& cfg, const std::string& pair) {
    auto [kind, stat] = parse_averaging_pair(pair);
    ContaminationSpec spec;
    spec.m = cfg.influence.m;
    spec.n_range = cfg.influence.n_range;
    spec.scr_db = cfg.influence.scr_db;
    spec.clutter = cfg.scenario.clutter;
    spec.clutter.N = cfg.scenario.N;
    spec.clutter.texture_on = false;
    spec.steering = SteeringSpec::ideal(cfg.scenario.N, cfg.scenario.fd);
    spec.averaging = {kind, stat};
    spec.repeats = cfg.influence.repeats;
    spec.master_seed = cfg.seed;
    spec.redraw_clean = cfg.influence.redraw_clean;
    spec.solver.tol = 1e-5;
    spec.workers = cfg.workers;
    return spec;
}

}  // namespace mcfar::cli
