#include "mcfar/metrics.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Cholesky>

namespace mcfar {

const char* metric_name(MetricKind kind) {
    switch (kind) {
        case MetricKind::AIRM: return "airm";
        case MetricKind::LE: return "le";
        case MetricKind::BW: return "bw";
        case MetricKind::Euclidean: return "euclidean";
    }
    return "?";
}

MetricKind metric_from_name(const std::string& name) {
    if (name == "airm") return MetricKind::AIRM;
    if (name == "le") return MetricKind::LE;
    if (name == "bw") return MetricKind::BW;
    if (name == "euclidean") return MetricKind::Euclidean;
    throw InvalidInput("unknown metric kind '" + name + "'");
}

namespace detail {

namespace {

// Entrywise Loewner transform in the eigenbasis of the base point.
// f and df are the scalar function and its derivative.
template <typename F, typename DF>
CMatrix divided_difference_apply(const CMatrix& u, const RVector& lam, const CMatrix& v, F f,
                                 DF df) {
    const Eigen::Index n = lam.size();
    const double scale = std::max(lam.cwiseAbs().maxCoeff(), 1e-300);
    CMatrix vt = u.adjoint() * v * u;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            const double li = lam[i], lj = lam[j];
            double phi;
            if (std::abs(li - lj) < 1e-12 * scale) {
                phi = df(0.5 * (li + lj));
            } else {
                phi = (f(li) - f(lj)) / (li - lj);
            }
            vt(i, j) *= phi;
        }
    }
    return symmetrize(u * vt * u.adjoint());
}

double bw_sq_dist(const CMatrix& p1, const CMatrix& p2) {
    CMatrix root = sqrt_raw(p1, "distance(bw)");
    auto [u, lam] = eigh(symmetrize(root * p2 * root), "distance(bw)");
    double cross = 0.0;
    for (Eigen::Index i = 0; i < lam.size(); ++i) cross += std::sqrt(std::max(lam[i], 0.0));
    const double traces = p1.trace().real() + p2.trace().real();
    const double d2 = traces - 2.0 * cross;
    // the trace difference cancels catastrophically for nearby points; the
    // equivalent metric form d^2 = tr(P1 (P1^{-1}#P2 - I)^2) stays accurate
    if (d2 < 1e-12 * traces) {
        CMatrix delta = midpoint_inv_first_raw(p1, p2) - CMatrix::Identity(p1.rows(), p1.cols());
        return std::max((p1 * delta * delta).trace().real(), 0.0);
    }
    return std::max(d2, 0.0);
}

}  // namespace

CMatrix dlog_raw(const CMatrix& p, const CMatrix& v) {
    auto [u, lam] = eigh(p, "dlog");
    require_positive(lam, "dlog");
    return divided_difference_apply(
        u, lam, v, [](double x) { return std::log(x); }, [](double x) { return 1.0 / x; });
}

CMatrix dexp_raw(const CMatrix& x, const CMatrix& v) {
    auto [u, lam] = eigh(x, "dexp");
    return divided_difference_apply(
        u, lam, v, [](double t) { return std::exp(t); }, [](double t) { return std::exp(t); });
}

double distance_raw(MetricKind kind, const CMatrix& p1, const CMatrix& p2) {
    switch (kind) {
        case MetricKind::AIRM: {
            auto [u, lam] = eigh(p1, "distance(airm)");
            require_positive(lam, "distance(airm)");
            CMatrix iroot = u * lam.cwiseSqrt().cwiseInverse().asDiagonal() * u.adjoint();
            auto [u2, lam2] = eigh(symmetrize(iroot * p2 * iroot), "distance(airm)");
            require_positive(lam2, "distance(airm)");
            return lam2.array().log().matrix().norm();
        }
        case MetricKind::LE:
            return (log_raw(p2, "distance(le)") - log_raw(p1, "distance(le)")).norm();
        case MetricKind::BW:
            return std::sqrt(bw_sq_dist(p1, p2));
        case MetricKind::Euclidean:
            return (p2 - p1).norm();
    }
    throw InvalidInput("distance: unknown metric kind");
}

CMatrix exp_map_raw(MetricKind kind, const CMatrix& p, const CMatrix& v) {
    switch (kind) {
        case MetricKind::AIRM: {
            auto [u, lam] = eigh(p, "exp_map(airm)");
            require_positive(lam, "exp_map(airm)");
            CMatrix root = u * lam.cwiseSqrt().asDiagonal() * u.adjoint();
            CMatrix iroot = u * lam.cwiseSqrt().cwiseInverse().asDiagonal() * u.adjoint();
            CMatrix inner = exp_raw(symmetrize(iroot * v * iroot));
            return symmetrize(root * inner * root);
        }
        case MetricKind::LE:
            return exp_raw(log_raw(p, "exp_map(le)") + dlog_raw(p, v));
        case MetricKind::BW: {
            CMatrix s = CMatrix::Identity(p.rows(), p.cols()) + lyapunov_raw(p, v);
            const double lo = eigh(s, "exp_map(bw)").second.minCoeff();
            if (!(lo > 0.0))
                throw DomainError(
                    "exp_map(bw): I + L_P[V] leaves the HPD cone (min eigenvalue " +
                    std::to_string(lo) + ")");
            return symmetrize(s * p * s);
        }
        case MetricKind::Euclidean:
            return symmetrize(p + v);
    }
    throw InvalidInput("exp_map: unknown metric kind");
}

CMatrix log_map_raw(MetricKind kind, const CMatrix& p1, const CMatrix& p2) {
    switch (kind) {
        case MetricKind::AIRM: {
            auto [u, lam] = eigh(p1, "log_map(airm)");
            require_positive(lam, "log_map(airm)");
            CMatrix root = u * lam.cwiseSqrt().asDiagonal() * u.adjoint();
            CMatrix iroot = u * lam.cwiseSqrt().cwiseInverse().asDiagonal() * u.adjoint();
            CMatrix inner = log_raw(symmetrize(iroot * p2 * iroot), "log_map(airm)");
            return symmetrize(root * inner * root);
        }
        case MetricKind::LE: {
            CMatrix l1 = log_raw(p1, "log_map(le)");
            CMatrix l2 = log_raw(p2, "log_map(le)");
            return dexp_raw(l1, l2 - l1);
        }
        case MetricKind::BW: {
            CMatrix m = midpoint_inv_first_raw(p1, p2);  // P1^{-1} # P2
            CMatrix d = m - CMatrix::Identity(p1.rows(), p1.cols());
            return symmetrize(p1 * d + d * p1);
        }
        case MetricKind::Euclidean:
            return symmetrize(p2 - p1);
    }
    throw InvalidInput("log_map: unknown metric kind");
}

double metric_inner_raw(MetricKind kind, const CMatrix& p, const CMatrix& a, const CMatrix& b) {
    switch (kind) {
        case MetricKind::AIRM: {
            Eigen::LLT<CMatrix> llt(p);
            if (llt.info() != Eigen::Success)
                throw DomainError("metric_inner(airm): base point not HPD");
            CMatrix pa = llt.solve(a);
            CMatrix pb = llt.solve(b);
            return (pa * pb).trace().real();
        }
        case MetricKind::LE:
            return (dlog_raw(p, a) * dlog_raw(p, b)).trace().real();
        case MetricKind::BW:
            return 0.5 * (lyapunov_raw(p, a) * b).trace().real();
        case MetricKind::Euclidean:
            return (a * b).trace().real();
    }
    throw InvalidInput("metric_inner: unknown metric kind");
}

}  // namespace detail

static void require_same_dim(int d1, int d2, const char* where) {
    if (d1 != d2) throw InvalidInput(std::string(where) + ": dimension mismatch");
}

double distance(MetricKind kind, const HpdMatrix& p1, const HpdMatrix& p2) {
    require_same_dim(p1.dim(), p2.dim(), "distance");
    return detail::distance_raw(kind, p1.mat(), p2.mat());
}

HpdMatrix geodesic(MetricKind kind, const HpdMatrix& p1, const HpdMatrix& p2, double t) {
    require_same_dim(p1.dim(), p2.dim(), "geodesic");
    if (!(t >= 0.0 && t <= 1.0)) throw InvalidInput("geodesic: t must lie in [0,1]");
    switch (kind) {
        case MetricKind::AIRM: {
            auto [u, lam] = detail::eigh(p1.mat(), "geodesic(airm)");
            detail::require_positive(lam, "geodesic(airm)");
            CMatrix root = u * lam.cwiseSqrt().asDiagonal() * u.adjoint();
            CMatrix iroot = u * lam.cwiseSqrt().cwiseInverse().asDiagonal() * u.adjoint();
            CMatrix inner =
                detail::pow_raw(detail::symmetrize(iroot * p2.mat() * iroot), t, "geodesic(airm)");
            return HpdMatrix::unchecked(root * inner * root);
        }
        case MetricKind::LE: {
            CMatrix l1 = detail::log_raw(p1.mat(), "geodesic(le)");
            CMatrix l2 = detail::log_raw(p2.mat(), "geodesic(le)");
            return HpdMatrix::unchecked(detail::exp_raw((1.0 - t) * l1 + t * l2));
        }
        case MetricKind::BW: {
            // S P1 S with S = (1-t) I + t (P1^{-1} # P2): equivalent to the
            // (1-t)^2, t^2, cross-term expansion and manifestly PD on [0,1].
            CMatrix m = detail::midpoint_inv_first_raw(p1.mat(), p2.mat());
            CMatrix s = (1.0 - t) * CMatrix::Identity(p1.dim(), p1.dim()) + t * m;
            return HpdMatrix::unchecked(s * p1.mat() * s);
        }
        case MetricKind::Euclidean:
            return HpdMatrix::unchecked((1.0 - t) * p1.mat() + t * p2.mat());
    }
    throw InvalidInput("geodesic: unknown metric kind");
}

HpdMatrix exp_map(MetricKind kind, const HpdMatrix& p, const HermitianMatrix& v) {
    require_same_dim(p.dim(), v.dim(), "exp_map");
    if (kind == MetricKind::Euclidean) return HpdMatrix(p.mat() + v.mat());
    return HpdMatrix::unchecked(detail::exp_map_raw(kind, p.mat(), v.mat()));
}

HermitianMatrix log_map(MetricKind kind, const HpdMatrix& p1, const HpdMatrix& p2) {
    require_same_dim(p1.dim(), p2.dim(), "log_map");
    return HermitianMatrix::unchecked(detail::log_map_raw(kind, p1.mat(), p2.mat()));
}

HermitianMatrix grad_sq_dist(MetricKind kind, const HpdMatrix& pref, const HpdMatrix& r) {
    require_same_dim(pref.dim(), r.dim(), "grad_sq_dist");
    return HermitianMatrix::unchecked(-2.0 * detail::log_map_raw(kind, r.mat(), pref.mat()));
}

HermitianMatrix grad_dist(MetricKind kind, const HpdMatrix& pref, const HpdMatrix& r) {
    require_same_dim(pref.dim(), r.dim(), "grad_dist");
    if ((pref.mat() - r.mat()).norm() <= 1e-12 * std::max(pref.mat().norm(), r.mat().norm()))
        throw DomainError("grad_dist: undefined at zero distance");
    const double d = detail::distance_raw(kind, pref.mat(), r.mat());
    if (!(d > 0.0)) throw DomainError("grad_dist: undefined at zero distance");
    return HermitianMatrix::unchecked(-1.0 / d * detail::log_map_raw(kind, r.mat(), pref.mat()));
}

double metric_inner(MetricKind kind, const HpdMatrix& p, const HermitianMatrix& a,
                    const HermitianMatrix& b) {
    require_same_dim(p.dim(), a.dim(), "metric_inner");
    require_same_dim(p.dim(), b.dim(), "metric_inner");
    return detail::metric_inner_raw(kind, p.mat(), a.mat(), b.mat());
}

double metric_norm(MetricKind kind, const HpdMatrix& p, const HermitianMatrix& a) {
    return std::sqrt(std::max(metric_inner(kind, p, a, a), 0.0));
}

HermitianMatrix dlog(const HpdMatrix& p, const HermitianMatrix& v) {
    require_same_dim(p.dim(), v.dim(), "dlog");
    return HermitianMatrix::unchecked(detail::dlog_raw(p.mat(), v.mat()));
}

HermitianMatrix dexp(const HermitianMatrix& x, const HermitianMatrix& v) {
    require_same_dim(x.dim(), v.dim(), "dexp");
    return HermitianMatrix::unchecked(detail::dexp_raw(x.mat(), v.mat()));
}

}  // namespace mcfar
