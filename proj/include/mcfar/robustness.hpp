#pragma once

#include <cstdint>
#include <vector>

#include "mcfar/averaging.hpp"
#include "mcfar/signal.hpp"

namespace mcfar {

struct AveragingChoice {
    MetricKind kind = MetricKind::BW;
    Statistic statistic = Statistic::Mean;
};

/// One influence-function experiment: m clean Gaussian-clutter
/// autocovariances contaminated by n target-bearing outliers.
struct ContaminationSpec {
    int m = 50;
    std::vector<int> n_range;  // outlier counts
    double scr_db = 40.0;      // outlier target strength
    ClutterParams clutter;     // Gaussian benchmark: texture_on is forced off
    SteeringSpec steering = SteeringSpec::ideal(8, 0.2);
    AveragingChoice averaging;
    int repeats = 100;
    std::uint64_t master_seed = 0;
    bool redraw_clean = true;  // false: one clean draw shared by all repeats
    SolverConfig solver{std::nullopt, 1e-5, 500, std::nullopt};
    int workers = 1;
};

void validate_contamination(const ContaminationSpec& spec);

struct InfluencePoint {
    int n = 0;
    double f_mean = 0.0;
    double f_stderr = 0.0;
    int repeats = 0;
    int drops = 0;
};

struct InfluenceResult {
    AveragingChoice averaging;
    std::vector<InfluencePoint> points;
    std::uint64_t master_seed = 0;
};

/// Riemannian gradient at r of the contaminated objective
///   (1-eps) (1/m) sum d^2(R_i, .) + eps (1/n) sum d^2(P_j, .)
/// (d instead of d^2 for medians, with the d_floor exclusion convention).
HermitianMatrix contaminated_grad(const AveragingChoice& averaging,
                                  const std::vector<HpdMatrix>& clean,
                                  const std::vector<HpdMatrix>& outliers, double eps,
                                  const HpdMatrix& r);

/// First-order response H of the mean/median to an outlier mass: solves
/// A vec(H) = -b in an orthonormal Hermitian basis, where A holds central
/// finite differences of the clean gradient field along the basis and b the
/// outlier gradient at the clean solution.
HermitianMatrix influence_matrix(const AveragingChoice& averaging,
                                 const std::vector<HpdMatrix>& clean,
                                 const std::vector<HpdMatrix>& outliers,
                                 const SolverConfig& solver = {std::nullopt, 1e-5, 500,
                                                               std::nullopt});

/// Same, with the clean solution already computed.
HermitianMatrix influence_matrix_at(const AveragingChoice& averaging,
                                    const std::vector<HpdMatrix>& clean,
                                    const std::vector<HpdMatrix>& outliers,
                                    const HpdMatrix& rbar);

/// f = ||H||_F / ||Rbar||_F.
double influence_value(const HermitianMatrix& h, const HpdMatrix& rbar);

/// Small-eps recomputation oracle: converged solution of the contaminated
/// problem by Riemannian gradient descent with Armijo steps.
HpdMatrix solve_contaminated(const AveragingChoice& averaging, const std::vector<HpdMatrix>& clean,
                             const std::vector<HpdMatrix>& outliers, double eps,
                             const SolverConfig& cfg, const HpdMatrix& init);

InfluenceResult influence_curve(const ContaminationSpec& spec);

}  // namespace mcfar
