#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mcfar/metrics.hpp"
#include "mcfar/types.hpp"

namespace mcfar {

enum class Statistic { Mean, Median };

const char* statistic_name(Statistic s);
Statistic statistic_from_name(const std::string& name);

/// Step-size schedule for the gradient-descent solvers.
struct StepRule {
    enum class Kind { Fixed, Armijo };
    Kind kind = Kind::Fixed;
    double eta = 0.5;               // fixed step size
    double armijo_initial = 1.0;
    double armijo_shrink = 0.5;
    int max_halvings = 30;
    double sufficient_decrease = 1e-4;

    static StepRule fixed(double eta);
    static StepRule armijo(double initial = 1.0, double shrink = 0.5, int max_halvings = 30);
};

struct SolverConfig {
    std::optional<HpdMatrix> init;  // default: arithmetic mean of the inputs
    double tol = 1e-3;              // on |Delta R| = ||R_{t+1} - R_t||_F
    int max_iter = 500;
    std::optional<StepRule> step;   // default: fixed 1/2 for means, Armijo for medians
};

struct SolverReport {
    explicit SolverReport(HpdMatrix r) : result(std::move(r)) {}

    HpdMatrix result;
    int iterations = 0;
    double final_delta = 0.0;
    double stationarity_residual = 0.0;
    bool converged = false;
    std::vector<double> objective_trace;  // objective at the start of each iteration
    std::vector<double> delta_trace;      // |Delta R| per accepted step
};

struct AveragingProblem {
    std::vector<HpdMatrix> matrices;
    MetricKind kind = MetricKind::AIRM;
    Statistic statistic = Statistic::Mean;
};

/// (1/m) sum R_i; the minimizer of the Euclidean mean objective.
HpdMatrix arithmetic_mean(const std::vector<HpdMatrix>& matrices);

SolverReport airm_mean(const std::vector<HpdMatrix>& matrices, const SolverConfig& cfg = {});
SolverReport airm_median(const std::vector<HpdMatrix>& matrices, const SolverConfig& cfg = {});

/// Closed form exp((1/m) sum Log R_i); no iteration.
HpdMatrix le_mean(const std::vector<HpdMatrix>& matrices);
SolverReport le_median(const std::vector<HpdMatrix>& matrices, const SolverConfig& cfg = {});

/// Fixed-point iteration R <- (1/m) sum (R^{1/2} R_i R^{1/2})^{1/2}.
SolverReport bw_mean_fixed_a(const std::vector<HpdMatrix>& matrices, const SolverConfig& cfg = {});
/// Fixed-point iteration R <- R^{-1/2} ((1/m) sum (R^{1/2} R_i R^{1/2})^{1/2})^2 R^{-1/2}.
SolverReport bw_mean_fixed_b(const std::vector<HpdMatrix>& matrices, const SolverConfig& cfg = {});
/// Riemannian gradient descent; at the default step 1/2 the update is the
/// conjugation by (1/m) sum (R_i # R^{-1}).
SolverReport bw_mean_rgd(const std::vector<HpdMatrix>& matrices, const SolverConfig& cfg = {});
SolverReport bw_median_rgd(const std::vector<HpdMatrix>& matrices, const SolverConfig& cfg = {});

/// Weiszfeld iteration in the ambient (flat) geometry.
SolverReport euclidean_median(const std::vector<HpdMatrix>& matrices, const SolverConfig& cfg = {});

/// Uniform dispatch over the concrete solvers. (BW, mean) routes to the
/// gradient-descent solver; (Euclidean, mean) to the arithmetic mean.
SolverReport solve(const AveragingProblem& problem, const SolverConfig& cfg = {});

}  // namespace mcfar
