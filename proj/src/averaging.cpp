#include "mcfar/averaging.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

namespace mcfar {

const char* statistic_name(Statistic s) { return s == Statistic::Mean ? "mean" : "median"; }

Statistic statistic_from_name(const std::string& name) {
    if (name == "mean") return Statistic::Mean;
    if (name == "median") return Statistic::Median;
    throw InvalidInput("unknown statistic '" + name + "'");
}

StepRule StepRule::fixed(double eta) {
    if (!(eta > 0.0)) throw InvalidInput("StepRule::fixed: eta must be > 0");
    StepRule r;
    r.kind = Kind::Fixed;
    r.eta = eta;
    return r;
}

StepRule StepRule::armijo(double initial, double shrink, int max_halvings) {
    StepRule r;
    r.kind = Kind::Armijo;
    r.armijo_initial = initial;
    r.armijo_shrink = shrink;
    r.max_halvings = max_halvings;
    return r;
}

namespace {

using detail::eigh;
using detail::exp_raw;
using detail::log_raw;
using detail::require_positive;
using detail::symmetrize;

constexpr double kMedianFloorScale = 1e-9;  // d_floor = 1e-9 * ||R_t||_F

void check_matrices(const std::vector<HpdMatrix>& ms, const char* where) {
    if (ms.empty()) throw InvalidInput(std::string(where) + ": empty input");
    for (const auto& m : ms)
        if (m.dim() != ms[0].dim())
            throw InvalidInput(std::string(where) + ": dimension mismatch across inputs");
}

void validate_config(const SolverConfig& cfg, const char* where) {
    if (!(cfg.tol > 0.0)) throw InvalidInput(std::string(where) + ": tol must be > 0");
    if (cfg.max_iter < 1) throw InvalidInput(std::string(where) + ": max_iter must be >= 1");
}

CMatrix arithmetic_mean_raw(const std::vector<HpdMatrix>& ms) {
    CMatrix a = CMatrix::Zero(ms[0].dim(), ms[0].dim());
    for (const auto& m : ms) a += m.mat();
    return a / static_cast<double>(ms.size());
}

CMatrix initial_point(const std::vector<HpdMatrix>& ms, const SolverConfig& cfg,
                      const char* where) {
    if (cfg.init) {
        if (cfg.init->dim() != ms[0].dim())
            throw InvalidInput(std::string(where) + ": init dimension mismatch");
        return cfg.init->mat();
    }
    return arithmetic_mean_raw(ms);
}

struct SqrtPair {
    CMatrix root;
    CMatrix iroot;
};

SqrtPair sqrt_pair(const CMatrix& r, const char* where) {
    auto [u, lam] = eigh(r, where);
    require_positive(lam, where);
    RVector sq = lam.cwiseSqrt();
    return {u * sq.asDiagonal() * u.adjoint(), u * sq.cwiseInverse().asDiagonal() * u.adjoint()};
}

double objective_of(MetricKind kind, Statistic stat, const std::vector<HpdMatrix>& ms,
                    const CMatrix& r) {
    double acc = 0.0;
    for (const auto& m : ms) {
        const double d = detail::distance_raw(kind, m.mat(), r);
        acc += stat == Statistic::Mean ? d * d : d;
    }
    return acc / static_cast<double>(ms.size());
}

void guard_iterate(const CMatrix& r, int iter, const std::vector<double>& deltas,
                   const char* where) {
    if (r.allFinite() && r.norm() < 1e150) return;
    std::ostringstream os;
    os << where << ": divergent iterate at iteration " << iter << "; |Delta R| trace:";
    const std::size_t k = deltas.size() > 6 ? deltas.size() - 6 : 0;
    for (std::size_t i = k; i < deltas.size(); ++i) os << ' ' << deltas[i];
    throw NumericalFailure(os.str());
}

SolverReport single_point_report(const HpdMatrix& p) {
    SolverReport rep{p};
    rep.converged = true;
    rep.objective_trace.push_back(0.0);
    return rep;
}

struct StepOutcome {
    bool accepted = false;
    bool positivity_exhausted = false;
    CMatrix rnew;
    double obj_new = 0.0;
};

// Takes one descent step. `candidate(eta)` returns the trial point or an
// empty matrix when the step is infeasible (e.g. BW positivity loss).
StepOutcome take_step(const StepRule& rule, double obj_cur, double grad_sq,
                      const std::function<CMatrix(double)>& candidate,
                      const std::function<double(const CMatrix&)>& objective) {
    StepOutcome out;
    int feasible = 0;
    auto try_eta = [&](double eta, double required_decrease) -> bool {
        CMatrix c = candidate(eta);
        if (c.size() == 0) return false;
        ++feasible;
        const double o = objective(c);
        if (std::isfinite(o) && o <= obj_cur - required_decrease) {
            out.accepted = true;
            out.rnew = std::move(c);
            out.obj_new = o;
            return true;
        }
        return false;
    };

    double eta;
    if (rule.kind == StepRule::Kind::Fixed) {
        if (try_eta(rule.eta, 0.0)) return out;
        // fall back to Armijo backtracking from the rejected step
        eta = rule.eta * rule.armijo_shrink;
    } else {
        eta = rule.armijo_initial;
    }
    for (int k = 0; k <= rule.max_halvings; ++k) {
        if (try_eta(eta, rule.sufficient_decrease * eta * grad_sq)) return out;
        eta *= rule.armijo_shrink;
    }
    out.positivity_exhausted = (feasible == 0);
    return out;
}

}  // namespace

HpdMatrix arithmetic_mean(const std::vector<HpdMatrix>& matrices) {
    check_matrices(matrices, "arithmetic_mean");
    return HpdMatrix::unchecked(arithmetic_mean_raw(matrices));
}

namespace {

// Weiszfeld vertex test: data point `i0` is the median when the metric norm
// of the unit-gradient sum over the non-coincident points does not exceed the
// coincident mass. Returns the Sigma-form residual when the test passes.
std::optional<double> vertex_median_residual(MetricKind kind, const std::vector<HpdMatrix>& ms,
                                             std::size_t i0) {
    const HpdMatrix& p = ms[i0];
    const double floor = kMedianFloorScale * p.mat().norm();
    CMatrix t = CMatrix::Zero(p.dim(), p.dim());
    int coincident = 0;
    for (const auto& mj : ms) {
        const double d = detail::distance_raw(kind, p.mat(), mj.mat());
        if (d < floor) {
            ++coincident;
            continue;
        }
        t += detail::log_map_raw(kind, p.mat(), mj.mat()) / d;
    }
    const double norm =
        std::sqrt(std::max(detail::metric_inner_raw(kind, p.mat(), t, t), 0.0));
    if (norm <= static_cast<double>(coincident) + 1e-12) return t.norm();
    return std::nullopt;
}

}  // namespace

// ---------------------------------------------------------------------------
// AIRM
// ---------------------------------------------------------------------------

namespace {

// Shared driver for the AIRM mean and median updates
//   R <- R^{1/2} exp(eta_eff * X) R^{1/2},
// where X collects the (possibly distance-weighted) logarithms
// Log(R^{-1/2} R_i R^{-1/2}).
SolverReport airm_descend(const std::vector<HpdMatrix>& ms, const SolverConfig& cfg,
                          Statistic stat, const char* where) {
    const auto m = static_cast<double>(ms.size());
    const int n = ms[0].dim();
    const bool user_rule = cfg.step.has_value();
    const StepRule rule =
        cfg.step.value_or(stat == Statistic::Mean ? StepRule::fixed(0.5) : StepRule::armijo());

    CMatrix r = initial_point(ms, cfg, where);
    SolverReport rep{HpdMatrix::unchecked(r)};

    auto tangent_state = [&](const CMatrix& at) {
        // returns (X, objective, included count, weiszfeld residual norm)
        struct State {
            CMatrix x;
            double obj = 0.0;
            std::size_t included = 0;
            std::size_t nearest = 0;
            double residual = 0.0;
            double inv_d_sum = 0.0;
            SqrtPair sp;
        } st;
        st.sp = sqrt_pair(at, where);
        st.x = CMatrix::Zero(n, n);
        CMatrix wsum = CMatrix::Zero(n, n);
        const double floor = kMedianFloorScale * at.norm();
        double nearest_d = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < ms.size(); ++i) {
            CMatrix li = log_raw(symmetrize(st.sp.iroot * ms[i].mat() * st.sp.iroot), where);
            const double di = li.norm();
            if (di < nearest_d) {
                nearest_d = di;
                st.nearest = i;
            }
            if (stat == Statistic::Mean) {
                st.x += li;
                st.obj += di * di;
                ++st.included;
            } else {
                st.obj += di;
                if (di >= floor) {
                    st.x += li / di;
                    wsum += li / di;
                    st.inv_d_sum += 1.0 / di;
                    ++st.included;
                }
            }
        }
        st.x /= m;
        st.obj /= m;
        if (stat == Statistic::Mean)
            st.residual = symmetrize(st.sp.root * st.x * st.sp.root).norm();
        else
            st.residual = symmetrize(st.sp.root * wsum * st.sp.root).norm();
        return st;
    };

    for (int iter = 1; iter <= cfg.max_iter; ++iter) {
        auto st = tangent_state(r);
        if (rep.objective_trace.empty()) rep.objective_trace.push_back(st.obj);

        if (stat == Statistic::Median && st.included < ms.size()) {
            // the iterate collided with a data point: vertex optimality test
            auto residual = vertex_median_residual(MetricKind::AIRM, ms, st.nearest);
            if (residual) {
                rep.iterations = iter;
                rep.converged = true;
                rep.final_delta = 0.0;
                rep.stationarity_residual = *residual;
                rep.result = ms[st.nearest];
                return rep;
            }
        }

        const double scale = stat == Statistic::Mean ? 2.0 : 1.0;
        const double grad_sq = scale * scale * st.x.squaredNorm();

        // medians: the Weiszfeld-normalized step m / sum(1/d_i) is the right
        // scale (it reproduces the distance-weighted fixed-point map)
        StepRule iter_rule = rule;
        if (!user_rule && stat == Statistic::Median && st.inv_d_sum > 0.0)
            iter_rule.armijo_initial = m / st.inv_d_sum;

        auto candidate = [&](double eta) {
            return symmetrize(st.sp.root * exp_raw(scale * eta * st.x) * st.sp.root);
        };
        auto obj_at = [&](const CMatrix& c) { return objective_of(MetricKind::AIRM, stat, ms, c); };

        auto out = take_step(iter_rule, st.obj, grad_sq, candidate, obj_at);
        if (!out.accepted) {
            // no step decreases the objective: numerically stationary
            rep.iterations = iter;
            rep.converged = true;
            rep.final_delta = 0.0;
            break;
        }
        const double delta = (out.rnew - r).norm();
        r = out.rnew;
        guard_iterate(r, iter, rep.delta_trace, where);
        rep.delta_trace.push_back(delta);
        rep.objective_trace.push_back(out.obj_new);
        rep.iterations = iter;
        rep.final_delta = delta;
        if (delta <= cfg.tol) {
            rep.converged = true;
            break;
        }
    }
    rep.result = HpdMatrix::unchecked(r);
    rep.stationarity_residual = tangent_state(r).residual;
    return rep;
}

}  // namespace

SolverReport airm_mean(const std::vector<HpdMatrix>& matrices, const SolverConfig& cfg) {
    check_matrices(matrices, "airm_mean");
    validate_config(cfg, "airm_mean");
    if (matrices.size() == 1) return single_point_report(matrices[0]);
    return airm_descend(matrices, cfg, Statistic::Mean, "airm_mean");
}

SolverReport airm_median(const std::vector<HpdMatrix>& matrices, const SolverConfig& cfg) {
    check_matrices(matrices, "airm_median");
    validate_config(cfg, "airm_median");
    if (matrices.size() == 1) return single_point_report(matrices[0]);
    // for two points every geodesic point is a median; return the symmetric
    // representative, which coincides with the mean
    if (matrices.size() == 2) return airm_descend(matrices, cfg, Statistic::Mean, "airm_median");
    return airm_descend(matrices, cfg, Statistic::Median, "airm_median");
}

// ---------------------------------------------------------------------------
// Log-Euclidean
// ---------------------------------------------------------------------------

HpdMatrix le_mean(const std::vector<HpdMatrix>& matrices) {
    check_matrices(matrices, "le_mean");
    CMatrix acc = CMatrix::Zero(matrices[0].dim(), matrices[0].dim());
    for (const auto& m : matrices) acc += log_raw(m.mat(), "le_mean");
    return HpdMatrix::unchecked(exp_raw(acc / static_cast<double>(matrices.size())));
}

namespace {

SolverReport le_mean_report(const std::vector<HpdMatrix>& ms) {
    SolverReport rep{le_mean(ms)};
    rep.converged = true;
    rep.objective_trace.push_back(
        objective_of(MetricKind::LE, Statistic::Mean, ms, rep.result.mat()));
    return rep;
}

// Weiszfeld fixed point in a flat space: points are Hermitian matrices,
// `embed` maps them back to the HPD cone for |Delta R| bookkeeping.
SolverReport flat_weiszfeld(const std::vector<CMatrix>& pts, const CMatrix& start,
                            const SolverConfig& cfg,
                            const std::function<CMatrix(const CMatrix&)>& embed,
                            const char* where) {
    const auto m = static_cast<double>(pts.size());
    const int n = static_cast<int>(start.rows());

    CMatrix l = start;
    CMatrix r = embed(l);
    SolverReport rep{HpdMatrix::unchecked(r)};

    auto flat_objective = [&](const CMatrix& at) {
        double o = 0.0;
        for (const auto& p : pts) o += (p - at).norm();
        return o / m;
    };

    double residual = 0.0;
    for (int iter = 1; iter <= cfg.max_iter; ++iter) {
        const double floor = kMedianFloorScale * r.norm();
        CMatrix num = CMatrix::Zero(n, n);
        double den = 0.0;
        std::size_t included = 0, nearest = 0;
        double nearest_d = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const double d = (pts[i] - l).norm();
            if (d < nearest_d) {
                nearest_d = d;
                nearest = i;
            }
            if (d >= floor) {
                num += pts[i] / d;
                den += 1.0 / d;
                ++included;
            }
        }
        if (rep.objective_trace.empty()) rep.objective_trace.push_back(flat_objective(l));
        if (included < pts.size() || den == 0.0) {
            // collision with a data point: vertex optimality test there
            const CMatrix& pstar = pts[nearest];
            CMatrix rstar = embed(pstar);
            const double vfloor = kMedianFloorScale * rstar.norm();
            CMatrix g = CMatrix::Zero(n, n);
            int coincident = 0;
            for (const auto& p : pts) {
                const double d = (pstar - p).norm();
                if (d < vfloor) {
                    ++coincident;
                    continue;
                }
                g += (pstar - p) / d;
            }
            if (g.norm() <= coincident + 1e-12) {
                rep.iterations = iter;
                rep.converged = true;
                rep.final_delta = 0.0;
                rep.stationarity_residual = g.norm();
                rep.result = HpdMatrix::unchecked(rstar);
                return rep;
            }
            if (den == 0.0) break;
        }
        CMatrix lnew = num / den;
        residual = (l - lnew).norm();  // fixed-point displacement
        CMatrix rnew = embed(lnew);
        const double delta = (rnew - r).norm();
        l = lnew;
        r = rnew;
        guard_iterate(r, iter, rep.delta_trace, where);
        rep.delta_trace.push_back(delta);
        rep.objective_trace.push_back(flat_objective(l));
        rep.iterations = iter;
        rep.final_delta = delta;
        if (delta <= cfg.tol) {
            rep.converged = true;
            break;
        }
    }
    rep.result = HpdMatrix::unchecked(r);
    rep.stationarity_residual = residual;
    return rep;
}

}  // namespace

SolverReport le_median(const std::vector<HpdMatrix>& matrices, const SolverConfig& cfg) {
    check_matrices(matrices, "le_median");
    validate_config(cfg, "le_median");
    if (matrices.size() == 1) return single_point_report(matrices[0]);
    if (matrices.size() == 2) return le_mean_report(matrices);

    std::vector<CMatrix> logs;
    logs.reserve(matrices.size());
    for (const auto& m : matrices) logs.push_back(log_raw(m.mat(), "le_median"));

    // all inputs identical: the common value is the median
    double spread = 0.0;
    for (const auto& l : logs) spread = std::max(spread, (l - logs[0]).norm());
    if (spread <= 1e-13 * (1.0 + logs[0].norm())) return single_point_report(matrices[0]);

    CMatrix l0 = log_raw(initial_point(matrices, cfg, "le_median"), "le_median");
    return flat_weiszfeld(
        logs, l0, cfg, [](const CMatrix& l) { return exp_raw(l); }, "le_median");
}

SolverReport euclidean_median(const std::vector<HpdMatrix>& matrices, const SolverConfig& cfg) {
    check_matrices(matrices, "euclidean_median");
    validate_config(cfg, "euclidean_median");
    if (matrices.size() == 1) return single_point_report(matrices[0]);
    if (matrices.size() == 2) {
        SolverReport rep{arithmetic_mean(matrices)};
        rep.converged = true;
        return rep;
    }
    std::vector<CMatrix> pts;
    pts.reserve(matrices.size());
    for (const auto& m : matrices) pts.push_back(m.mat());
    return flat_weiszfeld(
        pts, arithmetic_mean_raw(matrices), cfg, [](const CMatrix& l) { return l; },
        "euclidean_median");
}

// ---------------------------------------------------------------------------
// Bures--Wasserstein
// ---------------------------------------------------------------------------

namespace {

struct BwIterData {
    SqrtPair sp;
    CMatrix avg_sq;           // (1/m) sum (R^{1/2} R_i R^{1/2})^{1/2}
    std::vector<CMatrix> sq;  // kept only when per-point terms are needed
    std::vector<double> dist;
    double obj_mean = 0.0;
    double obj_median = 0.0;
};

BwIterData bw_prepare(const std::vector<HpdMatrix>& ms, const CMatrix& r, bool keep_terms,
                      const char* where) {
    const auto m = static_cast<double>(ms.size());
    const int n = static_cast<int>(r.rows());
    BwIterData data;
    data.sp = sqrt_pair(r, where);
    data.avg_sq = CMatrix::Zero(n, n);
    const double tr_r = r.trace().real();
    for (const auto& mi : ms) {
        auto [u, lam] = eigh(symmetrize(data.sp.root * mi.mat() * data.sp.root), where);
        double cross = 0.0;
        for (Eigen::Index k = 0; k < lam.size(); ++k) cross += std::sqrt(std::max(lam[k], 0.0));
        CMatrix sq = detail::spectral_apply(u, lam,
                                            [](double x) { return std::sqrt(std::max(x, 0.0)); });
        const double traces = mi.mat().trace().real() + tr_r;
        double d2 = std::max(traces - 2.0 * cross, 0.0);
        if (d2 < 1e-12 * traces) {
            // metric form, accurate when the iterate sits on a data point
            CMatrix delta = symmetrize(data.sp.iroot * sq * data.sp.iroot) -
                            CMatrix::Identity(n, n);
            d2 = std::max((r * delta * delta).trace().real(), 0.0);
        }
        const double d = std::sqrt(d2);
        data.obj_mean += d2;
        data.obj_median += d;
        data.dist.push_back(d);
        data.avg_sq += sq;
        if (keep_terms) data.sq.push_back(std::move(sq));
    }
    data.avg_sq /= m;
    data.obj_mean /= m;
    data.obj_median /= m;
    return data;
}

// Stationarity residual of the BW mean: ||(1/m) sum (I - R_i # R^{-1})||_F.
double bw_mean_residual(const BwIterData& data, int n) {
    CMatrix g = CMatrix::Identity(n, n) -
                symmetrize(data.sp.iroot * data.avg_sq * data.sp.iroot);
    return g.norm();
}

// Shared fixed-point loop for the two Theorem-4 iterations.
SolverReport bw_fixed_point(const std::vector<HpdMatrix>& ms, const SolverConfig& cfg,
                            bool conjugated, const char* where) {
    const int n = ms[0].dim();
    CMatrix r = initial_point(ms, cfg, where);
    SolverReport rep{HpdMatrix::unchecked(r)};

    for (int iter = 1; iter <= cfg.max_iter; ++iter) {
        BwIterData data = bw_prepare(ms, r, false, where);
        if (rep.objective_trace.empty()) rep.objective_trace.push_back(data.obj_mean);
        CMatrix rnew = conjugated
                           ? symmetrize(data.sp.iroot * data.avg_sq * data.avg_sq * data.sp.iroot)
                           : data.avg_sq;
        const double delta = (rnew - r).norm();
        r = rnew;
        guard_iterate(r, iter, rep.delta_trace, where);
        rep.delta_trace.push_back(delta);
        rep.objective_trace.push_back(objective_of(MetricKind::BW, Statistic::Mean, ms, r));
        rep.iterations = iter;
        rep.final_delta = delta;
        if (delta <= cfg.tol) {
            rep.converged = true;
            break;
        }
    }
    rep.result = HpdMatrix::unchecked(r);
    rep.stationarity_residual = bw_mean_residual(bw_prepare(ms, r, false, where), n);
    return rep;
}

}  // namespace

SolverReport bw_mean_fixed_a(const std::vector<HpdMatrix>& matrices, const SolverConfig& cfg) {
    check_matrices(matrices, "bw_mean_fixed_a");
    validate_config(cfg, "bw_mean_fixed_a");
    if (matrices.size() == 1) return single_point_report(matrices[0]);
    return bw_fixed_point(matrices, cfg, false, "bw_mean_fixed_a");
}

SolverReport bw_mean_fixed_b(const std::vector<HpdMatrix>& matrices, const SolverConfig& cfg) {
    check_matrices(matrices, "bw_mean_fixed_b");
    validate_config(cfg, "bw_mean_fixed_b");
    if (matrices.size() == 1) return single_point_report(matrices[0]);
    return bw_fixed_point(matrices, cfg, true, "bw_mean_fixed_b");
}

SolverReport bw_mean_rgd(const std::vector<HpdMatrix>& matrices, const SolverConfig& cfg) {
    check_matrices(matrices, "bw_mean_rgd");
    validate_config(cfg, "bw_mean_rgd");
    if (matrices.size() == 1) return single_point_report(matrices[0]);

    const char* where = "bw_mean_rgd";
    const int n = matrices[0].dim();
    const StepRule rule = cfg.step.value_or(StepRule::fixed(0.5));
    CMatrix r = initial_point(matrices, cfg, where);
    SolverReport rep{HpdMatrix::unchecked(r)};
    const CMatrix eye = CMatrix::Identity(n, n);

    for (int iter = 1; iter <= cfg.max_iter; ++iter) {
        BwIterData data = bw_prepare(matrices, r, false, where);
        if (rep.objective_trace.empty()) rep.objective_trace.push_back(data.obj_mean);
        CMatrix avg_mid = symmetrize(data.sp.iroot * data.avg_sq * data.sp.iroot);
        CMatrix g = eye - avg_mid;  // (1/m) sum (I - R_i # R^{-1})
        const double grad_sq = 4.0 * (r * g * g).trace().real();

        auto candidate = [&](double eta) -> CMatrix {
            CMatrix s = (1.0 - 2.0 * eta) * eye + 2.0 * eta * avg_mid;
            if (!(eigh(s, where).second.minCoeff() > 0.0)) return CMatrix();
            return symmetrize(s * r * s);
        };
        auto obj_at = [&](const CMatrix& c) {
            return objective_of(MetricKind::BW, Statistic::Mean, matrices, c);
        };

        auto out = take_step(rule, data.obj_mean, grad_sq, candidate, obj_at);
        if (!out.accepted) {
            if (out.positivity_exhausted)
                throw NumericalFailure(std::string(where) +
                                       ": step lost positivity at every trial size");
            rep.iterations = iter;
            rep.converged = true;
            rep.final_delta = 0.0;
            break;
        }
        const double delta = (out.rnew - r).norm();
        r = out.rnew;
        guard_iterate(r, iter, rep.delta_trace, where);
        rep.delta_trace.push_back(delta);
        rep.objective_trace.push_back(out.obj_new);
        rep.iterations = iter;
        rep.final_delta = delta;
        if (delta <= cfg.tol) {
            rep.converged = true;
            break;
        }
    }
    rep.result = HpdMatrix::unchecked(r);
    rep.stationarity_residual = bw_mean_residual(bw_prepare(matrices, r, false, where), n);
    return rep;
}

SolverReport bw_median_rgd(const std::vector<HpdMatrix>& matrices, const SolverConfig& cfg) {
    check_matrices(matrices, "bw_median_rgd");
    validate_config(cfg, "bw_median_rgd");
    if (matrices.size() == 1) return single_point_report(matrices[0]);
    if (matrices.size() == 2) return bw_mean_rgd(matrices, cfg);

    const char* where = "bw_median_rgd";
    const int n = matrices[0].dim();
    const auto m = static_cast<double>(matrices.size());
    const bool user_rule = cfg.step.has_value();
    const StepRule rule = cfg.step.value_or(StepRule::armijo());
    CMatrix r = initial_point(matrices, cfg, where);
    SolverReport rep{HpdMatrix::unchecked(r)};
    const CMatrix eye = CMatrix::Identity(n, n);

    auto weighted_field = [&](const BwIterData& data, const CMatrix& at) {
        // W = (1/m) sum_incl (I - R_i # R^{-1})/d_i and the Sigma-form residual
        struct Field {
            CMatrix w;
            double residual = 0.0;
            std::size_t included = 0;
            double inv_d_sum = 0.0;
        } f;
        f.w = CMatrix::Zero(n, n);
        const double floor = kMedianFloorScale * at.norm();
        for (std::size_t i = 0; i < data.sq.size(); ++i) {
            if (data.dist[i] < floor) continue;
            CMatrix mi = symmetrize(data.sp.iroot * data.sq[i] * data.sp.iroot);
            f.w += (eye - mi) / data.dist[i];
            f.inv_d_sum += 1.0 / data.dist[i];
            ++f.included;
        }
        f.residual = f.w.norm();  // Sigma-form (no 1/m)
        f.w /= m;
        return f;
    };

    for (int iter = 1; iter <= cfg.max_iter; ++iter) {
        BwIterData data = bw_prepare(matrices, r, true, where);
        if (rep.objective_trace.empty()) rep.objective_trace.push_back(data.obj_median);
        auto field = weighted_field(data, r);
        if (field.included < matrices.size()) {
            const std::size_t nearest =
                std::min_element(data.dist.begin(), data.dist.end()) - data.dist.begin();
            auto residual = vertex_median_residual(MetricKind::BW, matrices, nearest);
            if (residual) {
                rep.iterations = iter;
                rep.converged = true;
                rep.final_delta = 0.0;
                rep.stationarity_residual = *residual;
                rep.result = matrices[nearest];
                return rep;
            }
        }
        const double grad_sq = (r * field.w * field.w).trace().real();

        // Weiszfeld-normalized initial step: S becomes the distance-weighted
        // average of the midpoint maps R_i # R^{-1}
        StepRule iter_rule = rule;
        if (!user_rule && field.inv_d_sum > 0.0) iter_rule.armijo_initial = m / field.inv_d_sum;

        auto candidate = [&](double eta) -> CMatrix {
            CMatrix s = eye - eta * field.w;
            if (!(eigh(s, where).second.minCoeff() > 0.0)) return CMatrix();
            return symmetrize(s * r * s);
        };
        auto obj_at = [&](const CMatrix& c) {
            return objective_of(MetricKind::BW, Statistic::Median, matrices, c);
        };

        auto out = take_step(iter_rule, data.obj_median, grad_sq, candidate, obj_at);
        if (!out.accepted) {
            if (out.positivity_exhausted)
                throw NumericalFailure(std::string(where) +
                                       ": step lost positivity at every trial size");
            rep.iterations = iter;
            rep.converged = true;
            rep.final_delta = 0.0;
            break;
        }
        const double delta = (out.rnew - r).norm();
        r = out.rnew;
        guard_iterate(r, iter, rep.delta_trace, where);
        rep.delta_trace.push_back(delta);
        rep.objective_trace.push_back(out.obj_new);
        rep.iterations = iter;
        rep.final_delta = delta;
        if (delta <= cfg.tol) {
            rep.converged = true;
            break;
        }
    }
    rep.result = HpdMatrix::unchecked(r);
    {
        BwIterData data = bw_prepare(matrices, r, true, where);
        rep.stationarity_residual = weighted_field(data, r).residual;
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Dispatch
// ---------------------------------------------------------------------------

SolverReport solve(const AveragingProblem& problem, const SolverConfig& cfg) {
    check_matrices(problem.matrices, "solve");
    validate_config(cfg, "solve");
    const auto& ms = problem.matrices;
    switch (problem.kind) {
        case MetricKind::AIRM:
            return problem.statistic == Statistic::Mean ? airm_mean(ms, cfg)
                                                        : airm_median(ms, cfg);
        case MetricKind::LE:
            if (problem.statistic == Statistic::Mean) {
                SolverReport rep = le_mean_report(ms);
                return rep;
            }
            return le_median(ms, cfg);
        case MetricKind::BW:
            return problem.statistic == Statistic::Mean ? bw_mean_rgd(ms, cfg)
                                                        : bw_median_rgd(ms, cfg);
        case MetricKind::Euclidean:
            if (problem.statistic == Statistic::Mean) {
                SolverReport rep{arithmetic_mean(ms)};
                rep.converged = true;
                rep.objective_trace.push_back(
                    objective_of(MetricKind::Euclidean, Statistic::Mean, ms, rep.result.mat()));
                return rep;
            }
            return euclidean_median(ms, cfg);
    }
    throw InvalidInput("solve: unknown metric kind");
}

}  // namespace mcfar
