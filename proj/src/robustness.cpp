#include "mcfar/robustness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/SVD>

#include "mcfar/hermitian.hpp"
#include "mcfar/montecarlo.hpp"

namespace mcfar {

namespace {

constexpr double kMedianFloorScale = 1e-9;

// (1/k) sum grad d^2(P_i, R)  (d for medians, data-coincident terms excluded)
CMatrix gradient_field(const AveragingChoice& choice, const std::vector<HpdMatrix>& data,
                       const CMatrix& r) {
    const int n = static_cast<int>(r.rows());
    CMatrix acc = CMatrix::Zero(n, n);
    const double floor = kMedianFloorScale * r.norm();
    for (const auto& p : data) {
        if (choice.statistic == Statistic::Mean) {
            acc += -2.0 * detail::log_map_raw(choice.kind, r, p.mat());
        } else {
            const double d = detail::distance_raw(choice.kind, p.mat(), r);
            if (d < floor) continue;
            acc += -1.0 / d * detail::log_map_raw(choice.kind, r, p.mat());
        }
    }
    return acc / static_cast<double>(data.size());
}

double objective_value(const AveragingChoice& choice, const std::vector<HpdMatrix>& clean,
                       const std::vector<HpdMatrix>& outliers, double eps, const CMatrix& r) {
    auto part = [&](const std::vector<HpdMatrix>& data) {
        double acc = 0.0;
        for (const auto& p : data) {
            const double d = detail::distance_raw(choice.kind, p.mat(), r);
            acc += choice.statistic == Statistic::Mean ? d * d : d;
        }
        return acc / static_cast<double>(data.size());
    };
    double value = (1.0 - eps) * part(clean);
    if (eps != 0.0) value += eps * part(outliers);
    return value;
}

double basis_coefficient(const CMatrix& e, const CMatrix& x) {
    return (e * x).trace().real();  // <E, X>_F for Hermitian E, X
}

}  // namespace

void validate_contamination(const ContaminationSpec& spec) {
    if (spec.m < 2) throw InvalidInput("contamination: m must be >= 2");
    if (spec.n_range.empty()) throw InvalidInput("contamination: n_range is empty");
    for (int n : spec.n_range)
        if (n < 1) throw InvalidInput("contamination: every n must be >= 1");
    if (spec.repeats < 1) throw InvalidInput("contamination: repeats must be >= 1");
    validate(spec.clutter);
}

HermitianMatrix contaminated_grad(const AveragingChoice& averaging,
                                  const std::vector<HpdMatrix>& clean,
                                  const std::vector<HpdMatrix>& outliers, double eps,
                                  const HpdMatrix& r) {
    if (clean.empty()) throw InvalidInput("contaminated_grad: empty clean set");
    if (!(eps >= 0.0 && eps < 1.0)) throw InvalidInput("contaminated_grad: eps must lie in [0,1)");
    if (eps > 0.0 && outliers.empty())
        throw InvalidInput("contaminated_grad: outliers required when eps > 0");
    CMatrix g = (1.0 - eps) * gradient_field(averaging, clean, r.mat());
    if (eps > 0.0) g += eps * gradient_field(averaging, outliers, r.mat());
    return HermitianMatrix::unchecked(detail::symmetrize(g));
}

HermitianMatrix influence_matrix_at(const AveragingChoice& averaging,
                                    const std::vector<HpdMatrix>& clean,
                                    const std::vector<HpdMatrix>& outliers,
                                    const HpdMatrix& rbar) {
    if (clean.empty() || outliers.empty())
        throw InvalidInput("influence_matrix: clean and outlier sets must be nonempty");
    const int n = rbar.dim();
    const CMatrix& rb = rbar.mat();

    if (averaging.statistic == Statistic::Median) {
        const double floor = kMedianFloorScale * rb.norm();
        for (const auto& p : clean)
            if (detail::distance_raw(averaging.kind, p.mat(), rb) < floor)
                throw DegenerateMedian(
                    "influence_matrix: the median coincides with a clean data point");
    }

    // finite-difference step; capped so R +/- h E stays inside the cone
    const double lam_min = detail::eigh(rb, "influence_matrix").second.minCoeff();
    const double h = std::min(1e-5 * rb.norm(), 0.45 * lam_min);

    const auto basis = hermitian_basis(n);
    const int dim = static_cast<int>(basis.size());  // n^2

    Eigen::MatrixXd a(dim, dim);
    for (int col = 0; col < dim; ++col) {
        const CMatrix& e = basis[col].mat();
        CMatrix gp = gradient_field(averaging, clean, rb + h * e);
        CMatrix gm = gradient_field(averaging, clean, rb - h * e);
        CMatrix deriv = (gp - gm) / (2.0 * h);
        for (int row = 0; row < dim; ++row) a(row, col) = basis_coefficient(basis[row].mat(), deriv);
    }

    CMatrix outlier_grad = gradient_field(averaging, outliers, rb);
    Eigen::VectorXd b(dim);
    for (int row = 0; row < dim; ++row) b[row] = basis_coefficient(basis[row].mat(), outlier_grad);

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double smax = svd.singularValues().maxCoeff();
    const double smin = svd.singularValues().minCoeff();
    if (!(smin > 0.0) || smax / smin > 1e12)
        throw SingularHessian("influence_matrix: Hessian-action matrix condition number " +
                              std::to_string(smin > 0.0 ? smax / smin : INFINITY));

    Eigen::VectorXd x = svd.solve(-b);
    CMatrix hmat = CMatrix::Zero(n, n);
    for (int k = 0; k < dim; ++k) hmat += x[k] * basis[k].mat();
    return HermitianMatrix::unchecked(detail::symmetrize(hmat));
}

HermitianMatrix influence_matrix(const AveragingChoice& averaging,
                                 const std::vector<HpdMatrix>& clean,
                                 const std::vector<HpdMatrix>& outliers,
                                 const SolverConfig& solver) {
    SolverReport rep = solve({clean, averaging.kind, averaging.statistic}, solver);
    return influence_matrix_at(averaging, clean, outliers, rep.result);
}

double influence_value(const HermitianMatrix& h, const HpdMatrix& rbar) {
    if (h.dim() != rbar.dim()) throw InvalidInput("influence_value: dimension mismatch");
    return h.mat().norm() / rbar.mat().norm();
}

HpdMatrix solve_contaminated(const AveragingChoice& averaging, const std::vector<HpdMatrix>& clean,
                             const std::vector<HpdMatrix>& outliers, double eps,
                             const SolverConfig& cfg, const HpdMatrix& init) {
    CMatrix r = init.mat();
    const StepRule rule = cfg.step.value_or(StepRule::armijo());
    for (int iter = 0; iter < cfg.max_iter; ++iter) {
        HpdMatrix rp = HpdMatrix::unchecked(r);
        HermitianMatrix grad = contaminated_grad(averaging, clean, outliers, eps, rp);
        const double gsq = std::max(metric_inner(averaging.kind, rp, grad, grad), 0.0);
        const double obj = objective_value(averaging, clean, outliers, eps, r);

        double eta = rule.kind == StepRule::Kind::Fixed ? rule.eta : rule.armijo_initial;
        bool accepted = false;
        for (int k = 0; k <= rule.max_halvings; ++k) {
            CMatrix cand;
            try {
                cand = detail::exp_map_raw(averaging.kind, r, -eta * grad.mat());
            } catch (const DomainError&) {
                eta *= rule.armijo_shrink;
                continue;
            }
            const double o = objective_value(averaging, clean, outliers, eps, cand);
            if (std::isfinite(o) && o <= obj - rule.sufficient_decrease * eta * gsq) {
                const double delta = (cand - r).norm();
                r = cand;
                accepted = true;
                if (delta <= cfg.tol) return HpdMatrix::unchecked(r);
                break;
            }
            eta *= rule.armijo_shrink;
        }
        if (!accepted) break;  // numerically stationary
    }
    return HpdMatrix::unchecked(r);
}

InfluenceResult influence_curve(const ContaminationSpec& spec) {
    validate_contamination(spec);
    ClutterParams clutter = spec.clutter;
    clutter.texture_on = false;  // Gaussian clutter model
    const ClutterSampler sampler(clutter);
    const Snapshot s = steering_realize(spec.steering);
    const HpdMatrix r_scr = scr_reference(clutter);
    const double a = amplitude_from_scr(spec.scr_db, s, r_scr);

    auto draw_covs = [&](int count, std::uint64_t phase, std::uint64_t point, std::uint64_t trial,
                         bool with_target) {
        RngStream rng(spec.master_seed, stream_id(phase, point, trial));
        std::vector<HpdMatrix> covs;
        covs.reserve(count);
        for (int i = 0; i < count; ++i) {
            Snapshot x = sampler.sample(rng);
            if (with_target) x += a * s;
            covs.push_back(toeplitz_cov(x));
        }
        return covs;
    };

    InfluenceResult result;
    result.averaging = spec.averaging;
    result.master_seed = spec.master_seed;

    for (std::size_t ni = 0; ni < spec.n_range.size(); ++ni) {
        const int n_out = spec.n_range[ni];
        std::vector<double> f_values(spec.repeats, std::numeric_limits<double>::quiet_NaN());

        parallel_for(spec.repeats, spec.workers, [&](int rep) {
            const std::uint64_t clean_trial = spec.redraw_clean ? rep : 0;
            auto clean = draw_covs(spec.m, kPhaseInfluenceClean, ni, clean_trial, false);
            auto outliers = draw_covs(n_out, kPhaseInfluenceOutlier, ni, rep, true);
            try {
                SolverReport sol = solve({clean, spec.averaging.kind, spec.averaging.statistic},
                                         spec.solver);
                HermitianMatrix h =
                    influence_matrix_at(spec.averaging, clean, outliers, sol.result);
                f_values[rep] = influence_value(h, sol.result);
            } catch (const NumericalFailure&) {
                // dropped and reported via the drops counter
            } catch (const DomainError&) {
            }
        });

        InfluencePoint pt;
        pt.n = n_out;
        double sum = 0.0, sumsq = 0.0;
        int valid = 0;
        for (double v : f_values) {
            if (!std::isfinite(v)) continue;
            sum += v;
            sumsq += v * v;
            ++valid;
        }
        pt.repeats = valid;
        pt.drops = spec.repeats - valid;
        if (valid > 0) {
            pt.f_mean = sum / valid;
            const double var = std::max(sumsq / valid - pt.f_mean * pt.f_mean, 0.0);
            pt.f_stderr = valid > 1 ? std::sqrt(var / (valid - 1)) : 0.0;
        }
        result.points.push_back(pt);
    }
    return result;
}

}  // namespace mcfar
