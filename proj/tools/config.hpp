#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "mcfar/montecarlo.hpp"
#include "mcfar/robustness.hpp"

namespace mcfar::cli {

/// Configuration problems map to exit code 2; messages carry the field path.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct DetectSection {
    int N = 8;
    int m = 8;
    int m_mismatch = 24;  // the mismatch sweep runs at 3N
    ClutterParams clutter;
    double fd = 0.2;
    std::uint64_t steering_draw_seed = 1;
    std::optional<InterferenceSpec> interference = InterferenceSpec{};
    double pfa = 1e-2;
    int calib_trials = 10000;
    int trials_pd = 200;
    std::vector<std::string> detectors = {"amf", "anmf", "mcfar:bw:mean", "mcfar:bw:median"};
    std::vector<double> scr_grid_db = {0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0};
    std::vector<double> fd_grid;  // filled by defaults(): 21 points over [0,1)
    std::vector<double> theta_grid_deg = {1.0, 15.0, 30.0};
    double scr_db_fixed = 25.0;
};

struct SolverSection {
    double tol = 1e-3;
    int max_iter = 500;
};

struct BenchSection {
    int count_m = 10;
    int N = 8;
    double tol = 1e-5;
};

struct InfluenceSection {
    int m = 50;
    std::vector<int> n_range = {1, 5, 10, 20, 40};
    int repeats = 100;
    double scr_db = 40.0;
    std::vector<std::string> averaging = {"airm:mean", "airm:median", "le:mean",
                                          "le:median",  "bw:mean",    "bw:median"};
    bool redraw_clean = true;
};

struct RunConfig {
    std::uint64_t seed = 1;
    int workers = 1;
    DetectSection scenario;
    SolverSection solver;
    BenchSection bench;
    InfluenceSection influence;
};

/// Desk-scale defaults (the struct initializers) or the paper-scale preset.
RunConfig preset(const std::string& name);

/// Strict parse: unknown keys and type mismatches raise ConfigError with the
/// offending field path. Values present in the document override `base`.
RunConfig parse_config(const nlohmann::json& doc, RunConfig base);
RunConfig load_config_file(const std::string& path, RunConfig base);

/// Canonical JSON echo of the effective configuration.
nlohmann::json to_json(const RunConfig& cfg);

/// FNV-1a 64-bit hash of the canonical serialization, as fixed-width hex.
std::string config_hash(const RunConfig& cfg);

/// Assembled mcfar::ScenarioConfig for one sweep family.
ScenarioConfig make_scenario(const RunConfig& cfg, SweepKind sweep);

/// Assembled ContaminationSpec for one averaging pair ("<metric>:<stat>").
ContaminationSpec make_contamination(const RunConfig& cfg, const std::string& pair);

std::pair<MetricKind, Statistic> parse_averaging_pair(const std::string& pair);

}  // namespace mcfar::cli
