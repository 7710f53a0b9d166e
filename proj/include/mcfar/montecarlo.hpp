#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mcfar/averaging.hpp"
#include "mcfar/detectors.hpp"
#include "mcfar/signal.hpp"

namespace mcfar {

/// Stream-id layout shared by every experiment phase, so a single point of a
/// run can be reproduced in isolation: (phase << 56) | (point << 32) | trial.
constexpr std::uint64_t kPhaseCalibration = 1;
constexpr std::uint64_t kPhasePd = 2;
constexpr std::uint64_t kPhaseBench = 3;
constexpr std::uint64_t kPhaseInfluenceClean = 4;
constexpr std::uint64_t kPhaseInfluenceOutlier = 5;

constexpr std::uint64_t stream_id(std::uint64_t phase, std::uint64_t point, std::uint64_t trial) {
    return (phase << 56) | (point << 32) | trial;
}

/// Full description of one detection experiment.
struct ScenarioConfig {
    int N = 8;
    int m = 8;
    ClutterParams clutter;
    SteeringSpec steering = SteeringSpec::ideal(8, 0.2);
    std::optional<InterferenceSpec> interference = InterferenceSpec{};
    double pfa = 1e-2;
    int trials_pd = 200;
    int calib_trials = 0;  // 0: default ceil(100/pfa)
    std::vector<DetectorSpec> detectors;
    std::vector<double> scr_grid_db;
    std::vector<double> fd_grid;
    std::vector<double> theta_grid_deg;
    double scr_db_fixed = 25.0;  // SCR used by the fd and mismatch sweeps
    std::uint64_t master_seed = 0;
    SolverConfig solver{std::nullopt, 1e-3, 500, std::nullopt};
    int workers = 1;

    int effective_calib_trials() const;
};

void validate_scenario(const ScenarioConfig& cfg);

enum class SweepKind { Scr, Fd, Mismatch };

const char* sweep_name(SweepKind kind);

struct ThresholdEntry {
    std::string detector;
    double axis = 0.0;  // calibration point (0 when shared across the axis)
    double gamma = 0.0;
    int calib_trials = 0;
    int exceedances = 0;  // strict exceedances of gamma in the calibration sample
    int drops = 0;
};

struct PdPoint {
    double axis = 0.0;
    double pd = 0.0;
    double stderr_pd = 0.0;  // binomial standard error
    double gamma = 0.0;
    int trials = 0;
    int drops = 0;
};

struct PdCurve {
    SweepKind sweep = SweepKind::Scr;
    std::string axis_name;
    std::vector<DetectorSpec> detectors;
    std::vector<std::vector<PdPoint>> points;  // [detector][axis index]
    std::vector<ThresholdEntry> thresholds;
    long nonconverged_solves = 0;
    bool calibration_degraded = false;
    std::uint64_t master_seed = 0;
};

/// Order-statistic threshold: gamma is the K-th largest of the H0 statistics
/// with K = ceil(pfa * trials), so the strict-exceedance count K-1 stays at
/// or below pfa * trials.
double threshold_from_statistics(std::vector<double> h0_stats, double pfa, int* exceedances);

ThresholdEntry calibrate_threshold(const ScenarioConfig& cfg, const DetectorSpec& detector);

struct PdEstimate {
    double pd = 0.0;
    double stderr_pd = 0.0;
    int trials = 0;
    int drops = 0;
};

PdEstimate estimate_pd(const ScenarioConfig& cfg, const DetectorSpec& detector, double gamma,
                       double scr_db);

PdCurve run_scr_sweep(const ScenarioConfig& cfg);
PdCurve run_fd_sweep(const ScenarioConfig& cfg);
PdCurve run_mismatch_sweep(const ScenarioConfig& cfg);

/// Single H0 trial; returns one statistic per configured detector (NaN when
/// the averaging solver failed). Used by configuration dry runs.
std::vector<double> dry_run_statistics(const ScenarioConfig& cfg);

/// Deterministic Wishart-style HPD test matrices (2n complex samples each).
std::vector<HpdMatrix> random_hpd_set(int count, int n, std::uint64_t seed);

struct BenchSolverResult {
    std::string solver;
    int iterations = 0;
    double seconds = 0.0;
    double final_delta = 0.0;
    bool converged = false;
    std::vector<double> delta_trace;
    HpdMatrix result;
};

struct BenchReport {
    std::vector<BenchSolverResult> solvers;  // fixed_a, fixed_b, rgd
    // pairwise relative Frobenius distances, indexed like `solvers`
    std::vector<std::vector<double>> pairwise;
};

/// Runs the three BW mean solvers from the arithmetic-mean initial point.
BenchReport bench_bw_solvers(int count_m, int n, double tol, std::uint64_t seed);

/// Deterministic order-preserving parallel map: fn(i) for i in [0, n),
/// results identical for any worker count. fn must be reentrant.
void parallel_for(int n, int workers, const std::function<void(int)>& fn);

}  // namespace mcfar
