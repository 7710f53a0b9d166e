#include "commands.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace mcfar::cli {

using nlohmann::json;

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::ofstream open_output(const std::string& out_dir, const std::string& name) {
    std::filesystem::create_directories(out_dir);
    const std::string path = out_dir + "/" + name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw NumericalFailure("cannot open output file '" + path + "'");
    return out;
}

void write_summary(const std::string& out_dir, const std::string& name, const json& summary) {
    std::ofstream out = open_output(out_dir, name);
    out << summary.dump(2) << '\n';
}

struct DetectorColumns {
    std::string detector;   // family: amf / anmf / mcfar / gamf
    std::string metric;     // empty for amf/anmf
    std::string statistic;  // empty for amf/anmf
};

DetectorColumns columns_of(const DetectorSpec& spec) {
    switch (spec.family) {
        case DetectorSpec::Family::AMF: return {"amf", "", ""};
        case DetectorSpec::Family::ANMF: return {"anmf", "", ""};
        case DetectorSpec::Family::MatrixCFAR:
            return {"mcfar", metric_name(spec.metric), statistic_name(spec.statistic)};
        case DetectorSpec::Family::GeometricAMF:
            return {"gamf", metric_name(spec.metric), statistic_name(spec.statistic)};
    }
    return {"?", "", ""};
}

double elapsed_since(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int cmd_validate(const RunConfig& cfg, std::ostream& out) {
    // schema is already enforced by the parser; check the assembled scenarios
    for (SweepKind sweep : {SweepKind::Scr, SweepKind::Fd, SweepKind::Mismatch})
        validate_scenario(make_scenario(cfg, sweep));
    validate_contamination(make_contamination(cfg, cfg.influence.averaging.at(0)));

    // dry-run: one H0 trial per detector
    ScenarioConfig sc = make_scenario(cfg, SweepKind::Scr);
    std::vector<double> stats = dry_run_statistics(sc);

    json report;
    report["config"] = to_json(cfg);
    report["config_hash"] = config_hash(cfg);
    json dry;
    for (std::size_t d = 0; d < sc.detectors.size(); ++d)
        dry[sc.detectors[d].name()] = stats[d];
    report["dry_run_h0_statistics"] = dry;
    out << report.dump(2) << '\n';
    return 0;
}

int cmd_bench_mean(const RunConfig& cfg, const std::string& out_dir, std::ostream& log) {
    const auto t0 = std::chrono::steady_clock::now();
    BenchReport report = bench_bw_solvers(cfg.bench.count_m, cfg.bench.N, cfg.bench.tol, cfg.seed);

    std::ofstream csv = open_output(out_dir, "bench_mean.csv");
    csv << "# mcfar bench-mean config_hash=" << config_hash(cfg) << " seed=" << cfg.seed << '\n';
    csv << "solver,iterations,seconds,final_delta,pairwise_dist\n";
    for (std::size_t i = 0; i < report.solvers.size(); ++i) {
        const auto& s = report.solvers[i];
        double pairwise = 0.0;
        for (std::size_t j = 0; j < report.solvers.size(); ++j)
            pairwise = std::max(pairwise, report.pairwise[i][j]);
        csv << s.solver << ',' << s.iterations << ',' << fmt(s.seconds) << ','
            << fmt(s.final_delta) << ',' << fmt(pairwise) << '\n';
    }

    json summary;
    summary["command"] = "bench-mean";
    summary["config"] = to_json(cfg);
    summary["config_hash"] = config_hash(cfg);
    summary["seed"] = cfg.seed;
    json solvers = json::array();
    bool all_converged = true;
    for (const auto& s : report.solvers) {
        solvers.push_back({{"solver", s.solver},
                           {"iterations", s.iterations},
                           {"seconds", s.seconds},
                           {"final_delta", s.final_delta},
                           {"converged", s.converged},
                           {"delta_trace", s.delta_trace}});
        all_converged = all_converged && s.converged;
    }
    summary["solvers"] = solvers;
    summary["pairwise_relative_frobenius"] = report.pairwise;
    summary["elapsed_seconds"] = elapsed_since(t0);
    write_summary(out_dir, "bench_mean_summary.json", summary);

    log << "bench-mean: wrote " << out_dir << "/bench_mean.csv\n";
    return all_converged ? 0 : 1;
}

int cmd_detect(const RunConfig& cfg, SweepKind sweep, const std::string& out_dir,
               std::ostream& log) {
    const auto t0 = std::chrono::steady_clock::now();
    ScenarioConfig sc = make_scenario(cfg, sweep);
    PdCurve curve;
    switch (sweep) {
        case SweepKind::Scr: curve = run_scr_sweep(sc); break;
        case SweepKind::Fd: curve = run_fd_sweep(sc); break;
        case SweepKind::Mismatch: curve = run_mismatch_sweep(sc); break;
    }

    const std::string stem = std::string("detect_") + sweep_name(sweep);
    std::ofstream csv = open_output(out_dir, stem + ".csv");
    csv << "# mcfar detect sweep=" << sweep_name(sweep) << " config_hash=" << config_hash(cfg)
        << " seed=" << cfg.seed << '\n';
    csv << "axis,detector,metric,statistic,pd,stderr,trials,gamma\n";
    const std::size_t n_points = curve.points.empty() ? 0 : curve.points[0].size();
    for (std::size_t p = 0; p < n_points; ++p) {
        for (std::size_t d = 0; d < curve.detectors.size(); ++d) {
            const DetectorColumns cols = columns_of(curve.detectors[d]);
            const PdPoint& pt = curve.points[d][p];
            csv << fmt(pt.axis) << ',' << cols.detector << ',' << cols.metric << ','
                << cols.statistic << ',' << fmt(pt.pd) << ',' << fmt(pt.stderr_pd) << ','
                << pt.trials << ',' << fmt(pt.gamma) << '\n';
        }
    }

    json summary;
    summary["command"] = "detect";
    summary["sweep"] = sweep_name(sweep);
    summary["config"] = to_json(cfg);
    summary["config_hash"] = config_hash(cfg);
    summary["seed"] = cfg.seed;
    json thresholds = json::array();
    for (const auto& th : curve.thresholds) {
        thresholds.push_back({{"detector", th.detector},
                              {"axis", th.axis},
                              {"gamma", th.gamma},
                              {"calib_trials", th.calib_trials},
                              {"exceedances", th.exceedances},
                              {"drops", th.drops}});
    }
    summary["thresholds"] = thresholds;
    summary["calibration_degraded"] = curve.calibration_degraded;
    summary["nonconverged_solves"] = curve.nonconverged_solves;
    long total_drops = 0;
    for (const auto& det : curve.points)
        for (const auto& pt : det) total_drops += pt.drops;
    summary["pd_trial_drops"] = total_drops;
    summary["elapsed_seconds"] = elapsed_since(t0);
    write_summary(out_dir, stem + "_summary.json", summary);

    if (curve.calibration_degraded)
        log << "warning: CalibrationDegraded — more than 1% of calibration trials dropped\n";
    log << "detect(" << sweep_name(sweep) << "): wrote " << out_dir << "/" << stem << ".csv\n";
    return 0;
}

int cmd_influence(const RunConfig& cfg, const std::string& out_dir, std::ostream& log) {
    const auto t0 = std::chrono::steady_clock::now();

    std::ofstream csv = open_output(out_dir, "influence.csv");
    csv << "# mcfar influence config_hash=" << config_hash(cfg) << " seed=" << cfg.seed << '\n';
    csv << "n,metric,statistic,f_mean,f_stderr,repeats\n";

    json pairs = json::array();
    for (const auto& pair : cfg.influence.averaging) {
        ContaminationSpec spec = make_contamination(cfg, pair);
        InfluenceResult result = influence_curve(spec);
        const char* metric = metric_name(spec.averaging.kind);
        const char* stat = statistic_name(spec.averaging.statistic);
        json points = json::array();
        for (const auto& pt : result.points) {
            csv << pt.n << ',' << metric << ',' << stat << ',' << fmt(pt.f_mean) << ','
                << fmt(pt.f_stderr) << ',' << pt.repeats << '\n';
            points.push_back({{"n", pt.n},
                              {"f_mean", pt.f_mean},
                              {"f_stderr", pt.f_stderr},
                              {"repeats", pt.repeats},
                              {"drops", pt.drops}});
        }
        pairs.push_back({{"metric", metric}, {"statistic", stat}, {"points", points}});
        log << "influence: " << pair << " done\n";
    }

    json summary;
    summary["command"] = "influence";
    summary["config"] = to_json(cfg);
    summary["config_hash"] = config_hash(cfg);
    summary["seed"] = cfg.seed;
    summary["results"] = pairs;
    summary["elapsed_seconds"] = elapsed_since(t0);
    write_summary(out_dir, "influence_summary.json", summary);

    log << "influence: wrote " << out_dir << "/influence.csv\n";
    return 0;
}

}  // namespace mcfar::cli
