#include "mcfar/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <mutex>
#include <thread>

namespace mcfar {

int ScenarioConfig::effective_calib_trials() const {
    if (calib_trials > 0) return calib_trials;
    return static_cast<int>(std::ceil(100.0 / pfa));
}

void validate_scenario(const ScenarioConfig& cfg) {
    if (cfg.N < 2) throw InvalidInput("scenario: N must be >= 2");
    if (cfg.m < 1) throw InvalidInput("scenario: m must be >= 1");
    if (!(cfg.pfa > 0.0 && cfg.pfa < 1.0)) throw InvalidInput("scenario: pfa must lie in (0,1)");
    if (cfg.trials_pd < 1) throw InvalidInput("scenario: trials_pd must be >= 1");
    const int calib = cfg.effective_calib_trials();
    if (calib < static_cast<int>(std::ceil(1.0 / cfg.pfa)))
        throw InvalidInput("scenario: calib_trials must be >= ceil(1/pfa)");
    if (cfg.detectors.empty()) throw InvalidInput("scenario: no detectors configured");
    if (cfg.clutter.N != cfg.N) throw InvalidInput("scenario: clutter.N must equal N");
    if (cfg.steering.N != cfg.N) throw InvalidInput("scenario: steering.N must equal N");
    validate(cfg.clutter);
    const int axes = (cfg.scr_grid_db.empty() ? 0 : 1) + (cfg.fd_grid.empty() ? 0 : 1) +
                     (cfg.theta_grid_deg.empty() ? 0 : 1);
    if (axes != 1) throw InvalidInput("scenario: exactly one sweep axis must be nonempty");
    if (cfg.interference && cfg.interference->count > cfg.m)
        throw InvalidInput("scenario: interference count exceeds m");
}

const char* sweep_name(SweepKind kind) {
    switch (kind) {
        case SweepKind::Scr: return "scr";
        case SweepKind::Fd: return "fd";
        case SweepKind::Mismatch: return "mismatch";
    }
    return "?";
}

void parallel_for(int n, int workers, const std::function<void(int)>& fn) {
    workers = std::max(1, std::min(workers, n));
    if (workers == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::mutex err_mutex;
    std::exception_ptr err;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mutex);
                    if (!err) err = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

double threshold_from_statistics(std::vector<double> h0_stats, double pfa, int* exceedances) {
    if (h0_stats.empty())
        throw NumericalFailure("threshold_from_statistics: no valid calibration statistics");
    const int n = static_cast<int>(h0_stats.size());
    int k = static_cast<int>(std::ceil(pfa * n));
    k = std::clamp(k, 1, n);
    std::sort(h0_stats.begin(), h0_stats.end(), std::greater<double>());
    const double gamma = h0_stats[k - 1];
    if (exceedances) {
        int count = 0;
        for (double v : h0_stats)
            if (v > gamma) ++count;
        *exceedances = count;
    }
    return gamma;
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct DetectorNeeds {
    bool need_scm = false;
    bool need_rcut = false;
    std::vector<std::pair<MetricKind, Statistic>> pairs;  // distinct averaging pairs
    std::vector<int> pair_of;                             // per detector; -1 for AMF/ANMF
};

DetectorNeeds analyze(const std::vector<DetectorSpec>& detectors) {
    DetectorNeeds needs;
    for (const auto& d : detectors) {
        if (d.uses_scm()) {
            needs.need_scm = true;
            needs.pair_of.push_back(-1);
            continue;
        }
        if (d.family == DetectorSpec::Family::MatrixCFAR) needs.need_rcut = true;
        const std::pair<MetricKind, Statistic> key{d.metric, d.statistic};
        auto it = std::find(needs.pairs.begin(), needs.pairs.end(), key);
        if (it == needs.pairs.end()) {
            needs.pairs.push_back(key);
            needs.pair_of.push_back(static_cast<int>(needs.pairs.size()) - 1);
        } else {
            needs.pair_of.push_back(static_cast<int>(it - needs.pairs.begin()));
        }
    }
    return needs;
}

struct TrialEval {
    std::optional<HpdMatrix> scm_hat;
    std::vector<std::optional<HpdMatrix>> rg;
    std::optional<HpdMatrix> rcut;
    Snapshot cut;
    int nonconverged = 0;
};

class SweepEngine {
public:
    SweepEngine(const ScenarioConfig& cfg, SweepKind kind)
        : cfg_(cfg), kind_(kind), sampler_(cfg.clutter), needs_(analyze(cfg.detectors)) {
        switch (kind_) {
            case SweepKind::Scr:
                axis_ = cfg_.scr_grid_db;
                s_nominal_ = {steering_realize(cfg_.steering)};
                s_data_ = s_nominal_;
                break;
            case SweepKind::Fd:
                axis_ = cfg_.fd_grid;
                for (double fd : axis_) s_nominal_.push_back(steering_ideal(cfg_.N, fd));
                s_data_ = s_nominal_;
                break;
            case SweepKind::Mismatch: {
                axis_ = cfg_.theta_grid_deg;
                s_nominal_ = {steering_realize(
                    SteeringSpec::mismatched(cfg_.N, 0.0, cfg_.steering.orthogonal_draw_seed))};
                for (double theta : axis_)
                    s_data_.push_back(steering_realize(SteeringSpec::mismatched(
                        cfg_.N, theta, cfg_.steering.orthogonal_draw_seed)));
                break;
            }
        }
        if (axis_.empty()) throw InvalidInput("sweep: empty axis");
    }

    /// Number of calibration points a detector needs: the H0 statistic of a
    /// steering-dependent detector changes along the fd axis.
    int calibration_points(const DetectorSpec& d) const {
        return (kind_ == SweepKind::Fd && d.uses_steering()) ? static_cast<int>(axis_.size()) : 1;
    }

    const Snapshot& nominal_steering(int point) const {
        return s_nominal_[s_nominal_.size() == 1 ? 0 : point];
    }

    TrialEval evaluate_trial(Hypothesis hyp, const Snapshot& s_data, double scr_db,
                             RngStream& rng) const {
        TrialEval ev;
        auto secondary = make_secondary_set(cfg_.m, sampler_, cfg_.interference, rng);
        ev.cut = make_observation(hyp, sampler_, s_data, scr_db, rng);
        if (needs_.need_scm) ev.scm_hat = scm(secondary);
        if (!needs_.pairs.empty()) {
            std::vector<HpdMatrix> covs;
            covs.reserve(secondary.size());
            for (const auto& x : secondary) covs.push_back(toeplitz_cov(x));
            for (const auto& [metric, stat] : needs_.pairs) {
                try {
                    SolverReport rep = solve({covs, metric, stat}, cfg_.solver);
                    if (!rep.converged) ++ev.nonconverged;
                    ev.rg.emplace_back(std::move(rep.result));
                } catch (const NumericalFailure&) {
                    ev.rg.emplace_back(std::nullopt);
                } catch (const DomainError&) {
                    ev.rg.emplace_back(std::nullopt);
                }
            }
            if (needs_.need_rcut) ev.rcut = toeplitz_cov(ev.cut);
        }
        return ev;
    }

    double detector_stat(int d, const TrialEval& ev, const Snapshot& s_nom) const {
        const DetectorSpec& spec = cfg_.detectors[d];
        switch (spec.family) {
            case DetectorSpec::Family::AMF:
                return amf_stat(ev.cut, s_nom, *ev.scm_hat);
            case DetectorSpec::Family::ANMF:
                return anmf_stat(ev.cut, s_nom, *ev.scm_hat);
            case DetectorSpec::Family::MatrixCFAR: {
                const auto& rg = ev.rg[needs_.pair_of[d]];
                if (!rg) return kNaN;
                return matrix_cfar_stat(*rg, *ev.rcut, spec.metric);
            }
            case DetectorSpec::Family::GeometricAMF: {
                const auto& rg = ev.rg[needs_.pair_of[d]];
                if (!rg) return kNaN;
                return geometric_amf_stat(ev.cut, s_nom, *rg);
            }
        }
        return kNaN;
    }

    /// H0 calibration: per detector, per calibration point, the gamma table.
    struct Calibration {
        std::vector<std::vector<double>> gamma;  // [detector][cal point]
        std::vector<ThresholdEntry> entries;
        long nonconverged = 0;
        bool degraded = false;
    };

    Calibration calibrate() {
        const int n_det = static_cast<int>(cfg_.detectors.size());
        const int trials = cfg_.effective_calib_trials();
        std::vector<std::vector<std::vector<double>>> stats(n_det);
        for (int d = 0; d < n_det; ++d)
            stats[d].assign(calibration_points(cfg_.detectors[d]), std::vector<double>(trials));
        std::vector<int> nonconv(trials, 0);

        parallel_for(trials, cfg_.workers, [&](int t) {
            RngStream rng(cfg_.master_seed, stream_id(kPhaseCalibration, 0, t));
            TrialEval ev = evaluate_trial(Hypothesis::H0, s_data_[0], 0.0, rng);
            nonconv[t] = ev.nonconverged;
            for (int d = 0; d < n_det; ++d) {
                const int pts = static_cast<int>(stats[d].size());
                for (int p = 0; p < pts; ++p)
                    stats[d][p][t] = detector_stat(d, ev, nominal_steering(pts == 1 ? 0 : p));
            }
        });

        Calibration cal;
        for (int v : nonconv) cal.nonconverged += v;
        cal.gamma.resize(n_det);
        for (int d = 0; d < n_det; ++d) {
            for (std::size_t p = 0; p < stats[d].size(); ++p) {
                std::vector<double> valid;
                valid.reserve(stats[d][p].size());
                for (double v : stats[d][p])
                    if (std::isfinite(v)) valid.push_back(v);
                const int drops = trials - static_cast<int>(valid.size());
                if (drops > trials / 100) cal.degraded = true;
                int exceed = 0;
                const double g = threshold_from_statistics(valid, cfg_.pfa, &exceed);
                cal.gamma[d].push_back(g);
                cal.entries.push_back({cfg_.detectors[d].name(),
                                       stats[d].size() == 1 ? 0.0 : axis_[p], g,
                                       static_cast<int>(valid.size()), exceed, drops});
            }
        }
        return cal;
    }

    double scr_at(int point) const {
        return kind_ == SweepKind::Scr ? axis_[point] : cfg_.scr_db_fixed;
    }

    const Snapshot& data_steering(int point) const {
        return s_data_[s_data_.size() == 1 ? 0 : point];
    }

    /// H1 trials at one axis point; per-detector Pd against the given gammas.
    std::vector<PdPoint> pd_at_point(int point, const std::vector<double>& gamma_at_point,
                                     long* nonconverged) {
        const int n_det = static_cast<int>(cfg_.detectors.size());
        const int trials = cfg_.trials_pd;
        std::vector<std::vector<double>> stats(n_det, std::vector<double>(trials));
        std::vector<int> nonconv(trials, 0);

        parallel_for(trials, cfg_.workers, [&](int t) {
            RngStream rng(cfg_.master_seed,
                          stream_id(kPhasePd, static_cast<std::uint64_t>(point), t));
            TrialEval ev = evaluate_trial(Hypothesis::H1, data_steering(point), scr_at(point), rng);
            nonconv[t] = ev.nonconverged;
            for (int d = 0; d < n_det; ++d) {
                const int pts = calibration_points(cfg_.detectors[d]);
                stats[d][t] = detector_stat(d, ev, nominal_steering(pts == 1 ? 0 : point));
            }
        });

        if (nonconverged)
            for (int v : nonconv) *nonconverged += v;

        std::vector<PdPoint> out(n_det);
        for (int d = 0; d < n_det; ++d) {
            int valid = 0, hits = 0;
            for (double v : stats[d]) {
                if (!std::isfinite(v)) continue;
                ++valid;
                if (v > gamma_at_point[d]) ++hits;
            }
            PdPoint pt;
            pt.axis = axis_[point];
            pt.trials = valid;
            pt.drops = trials - valid;
            pt.gamma = gamma_at_point[d];
            pt.pd = valid > 0 ? static_cast<double>(hits) / valid : 0.0;
            pt.stderr_pd = valid > 0 ? std::sqrt(pt.pd * (1.0 - pt.pd) / valid) : 0.0;
            out[d] = pt;
        }
        return out;
    }

    PdCurve run() {
        Calibration cal = calibrate();
        PdCurve curve;
        curve.sweep = kind_;
        curve.axis_name = kind_ == SweepKind::Scr   ? "scr_db"
                          : kind_ == SweepKind::Fd ? "fd"
                                                   : "theta_mis_deg";
        curve.detectors = cfg_.detectors;
        curve.thresholds = cal.entries;
        curve.master_seed = cfg_.master_seed;
        curve.calibration_degraded = cal.degraded;
        curve.nonconverged_solves = cal.nonconverged;
        curve.points.assign(cfg_.detectors.size(), {});

        const int n_points = static_cast<int>(axis_.size());
        for (int p = 0; p < n_points; ++p) {
            std::vector<double> gammas;
            for (std::size_t d = 0; d < cfg_.detectors.size(); ++d) {
                const auto& g = cal.gamma[d];
                gammas.push_back(g.size() == 1 ? g[0] : g[p]);
            }
            auto pts = pd_at_point(p, gammas, &curve.nonconverged_solves);
            for (std::size_t d = 0; d < pts.size(); ++d) curve.points[d].push_back(pts[d]);
        }
        return curve;
    }

    const std::vector<double>& axis() const { return axis_; }

private:
    ScenarioConfig cfg_;
    SweepKind kind_;
    ClutterSampler sampler_;
    DetectorNeeds needs_;
    std::vector<double> axis_;
    std::vector<Snapshot> s_nominal_;  // detector-assumed steering
    std::vector<Snapshot> s_data_;     // steering carried by H1 data
};

ScenarioConfig with_single_detector(const ScenarioConfig& cfg, const DetectorSpec& detector,
                                    double scr_db) {
    ScenarioConfig c = cfg;
    c.detectors = {detector};
    c.scr_grid_db = {scr_db};
    c.fd_grid.clear();
    c.theta_grid_deg.clear();
    return c;
}

}  // namespace

ThresholdEntry calibrate_threshold(const ScenarioConfig& cfg, const DetectorSpec& detector) {
    ScenarioConfig c = with_single_detector(cfg, detector, cfg.scr_db_fixed);
    validate_scenario(c);
    SweepEngine engine(c, SweepKind::Scr);
    auto cal = engine.calibrate();
    return cal.entries.at(0);
}

PdEstimate estimate_pd(const ScenarioConfig& cfg, const DetectorSpec& detector, double gamma,
                       double scr_db) {
    ScenarioConfig c = with_single_detector(cfg, detector, scr_db);
    validate_scenario(c);
    SweepEngine engine(c, SweepKind::Scr);
    long nonconv = 0;
    auto pts = engine.pd_at_point(0, {gamma}, &nonconv);
    PdEstimate est;
    est.pd = pts[0].pd;
    est.stderr_pd = pts[0].stderr_pd;
    est.trials = pts[0].trials;
    est.drops = pts[0].drops;
    return est;
}

PdCurve run_scr_sweep(const ScenarioConfig& cfg) {
    validate_scenario(cfg);
    if (cfg.scr_grid_db.empty()) throw InvalidInput("run_scr_sweep: scr_grid_db is empty");
    return SweepEngine(cfg, SweepKind::Scr).run();
}

PdCurve run_fd_sweep(const ScenarioConfig& cfg) {
    validate_scenario(cfg);
    if (cfg.fd_grid.empty()) throw InvalidInput("run_fd_sweep: fd_grid is empty");
    return SweepEngine(cfg, SweepKind::Fd).run();
}

PdCurve run_mismatch_sweep(const ScenarioConfig& cfg) {
    validate_scenario(cfg);
    if (cfg.theta_grid_deg.empty())
        throw InvalidInput("run_mismatch_sweep: theta_grid_deg is empty");
    return SweepEngine(cfg, SweepKind::Mismatch).run();
}

std::vector<double> dry_run_statistics(const ScenarioConfig& cfg) {
    validate_scenario(cfg);
    SweepEngine engine(cfg, cfg.scr_grid_db.empty()
                                ? (cfg.fd_grid.empty() ? SweepKind::Mismatch : SweepKind::Fd)
                                : SweepKind::Scr);
    RngStream rng(cfg.master_seed, stream_id(kPhaseCalibration, 0, 0));
    TrialEval ev = engine.evaluate_trial(Hypothesis::H0, engine.data_steering(0), 0.0, rng);
    std::vector<double> stats;
    for (std::size_t d = 0; d < cfg.detectors.size(); ++d)
        stats.push_back(engine.detector_stat(static_cast<int>(d), ev, engine.nominal_steering(0)));
    return stats;
}

std::vector<HpdMatrix> random_hpd_set(int count, int n, std::uint64_t seed) {
    if (count < 1 || n < 1) throw InvalidInput("random_hpd_set: count and n must be >= 1");
    std::vector<HpdMatrix> out;
    out.reserve(count);
    for (int i = 0; i < count; ++i) {
        RngStream rng(seed, stream_id(kPhaseBench, 0, static_cast<std::uint64_t>(i)));
        const int samples = 2 * n;
        CMatrix acc = CMatrix::Zero(n, n);
        for (int k = 0; k < samples; ++k) {
            CVector v = rng.complex_normal_vector(n);
            acc += v * v.adjoint();
        }
        out.push_back(HpdMatrix(acc / static_cast<double>(samples)));
    }
    return out;
}

BenchReport bench_bw_solvers(int count_m, int n, double tol, std::uint64_t seed) {
    if (count_m < 2) throw InvalidInput("bench_bw_solvers: count_m must be >= 2");
    auto ms = random_hpd_set(count_m, n, seed);
    SolverConfig cfg;
    cfg.tol = tol;

    using Solver = SolverReport (*)(const std::vector<HpdMatrix>&, const SolverConfig&);
    const std::pair<const char*, Solver> solvers[] = {
        {"bw_mean_fixed_a", &bw_mean_fixed_a},
        {"bw_mean_fixed_b", &bw_mean_fixed_b},
        {"bw_mean_rgd", &bw_mean_rgd},
    };

    BenchReport report;
    for (const auto& [name, fn] : solvers) {
        const auto t0 = std::chrono::steady_clock::now();
        SolverReport rep = fn(ms, cfg);
        const auto t1 = std::chrono::steady_clock::now();
        BenchSolverResult res{name,
                              rep.iterations,
                              std::chrono::duration<double>(t1 - t0).count(),
                              rep.final_delta,
                              rep.converged,
                              rep.delta_trace,
                              rep.result};
        report.solvers.push_back(std::move(res));
    }
    const std::size_t k = report.solvers.size();
    report.pairwise.assign(k, std::vector<double>(k, 0.0));
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            const CMatrix& a = report.solvers[i].result.mat();
            const CMatrix& b = report.solvers[j].result.mat();
            report.pairwise[i][j] = (a - b).norm() / std::max(a.norm(), b.norm());
        }
    }
    return report;
}

}  // namespace mcfar
