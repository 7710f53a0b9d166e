#include "mcfar/hermitian.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace mcfar {

namespace detail {

std::pair<CMatrix, RVector> eigh(const CMatrix& a, const char* where) {
    require_finite(a, where);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(a);
    if (es.info() != Eigen::Success)
        throw NumericalFailure(std::string(where) + ": eigensolver did not converge");
    return {es.eigenvectors(), es.eigenvalues()};
}

void require_positive(const RVector& lam, const char* what) {
    const double hi = lam.maxCoeff();
    const double lo = lam.minCoeff();
    if (!(lo > 0.0) || hi <= 0.0)
        throw DomainError(std::string(what) + ": input is not positive definite (min eigenvalue " +
                          std::to_string(lo) + ")");
}

CMatrix exp_raw(const CMatrix& hermitian) {
    auto [u, lam] = eigh(hermitian, "matrix_exp");
    return spectral_apply(u, lam, [](double x) { return std::exp(x); });
}

CMatrix log_raw(const CMatrix& hpd, const char* what) {
    auto [u, lam] = eigh(hpd, what);
    require_positive(lam, what);
    return spectral_apply(u, lam, [](double x) { return std::log(x); });
}

CMatrix sqrt_raw(const CMatrix& hpd, const char* what) {
    auto [u, lam] = eigh(hpd, what);
    require_positive(lam, what);
    return spectral_apply(u, lam, [](double x) { return std::sqrt(x); });
}

CMatrix inv_raw(const CMatrix& hpd, const char* what) {
    auto [u, lam] = eigh(hpd, what);
    require_positive(lam, what);
    return spectral_apply(u, lam, [](double x) { return 1.0 / x; });
}

CMatrix pow_raw(const CMatrix& hpd, double t, const char* what) {
    auto [u, lam] = eigh(hpd, what);
    require_positive(lam, what);
    return spectral_apply(u, lam, [t](double x) { return std::pow(x, t); });
}

CMatrix lyapunov_raw(const CMatrix& p, const CMatrix& a) {
    auto [u, lam] = eigh(p, "lyapunov_solve");
    require_positive(lam, "lyapunov_solve");
    CMatrix at = u.adjoint() * a * u;
    for (Eigen::Index i = 0; i < at.rows(); ++i)
        for (Eigen::Index j = 0; j < at.cols(); ++j) at(i, j) /= lam[i] + lam[j];
    return symmetrize(u * at * u.adjoint());
}

CMatrix midpoint_raw(const CMatrix& p1, const CMatrix& p2) {
    auto [u, lam] = eigh(p1, "geometric_midpoint");
    require_positive(lam, "geometric_midpoint");
    RVector sq = lam.cwiseSqrt();
    CMatrix root = u * sq.asDiagonal() * u.adjoint();
    CMatrix iroot = u * sq.cwiseInverse().asDiagonal() * u.adjoint();
    CMatrix inner = sqrt_raw(symmetrize(iroot * p2 * iroot), "geometric_midpoint");
    return symmetrize(root * inner * root);
}

CMatrix midpoint_inv_first_raw(const CMatrix& p, const CMatrix& q) {
    // P^{-1} # Q = P^{-1/2} (P^{1/2} Q P^{1/2})^{1/2} P^{-1/2}
    auto [u, lam] = eigh(p, "geometric_midpoint");
    require_positive(lam, "geometric_midpoint");
    RVector sq = lam.cwiseSqrt();
    CMatrix root = u * sq.asDiagonal() * u.adjoint();
    CMatrix iroot = u * sq.cwiseInverse().asDiagonal() * u.adjoint();
    CMatrix inner = sqrt_raw(symmetrize(root * q * root), "geometric_midpoint");
    return symmetrize(iroot * inner * iroot);
}

}  // namespace detail

EigenDecomposition eig_hermitian(const HermitianMatrix& a) {
    auto [u, lam] = detail::eigh(a.mat(), "eig_hermitian");
    // solver returns ascending order; flip to descending
    EigenDecomposition d;
    d.unitary = u.rowwise().reverse();
    d.eigenvalues = lam.reverse();
    return d;
}

HpdMatrix matrix_exp(const HermitianMatrix& a) {
    return HpdMatrix::unchecked(detail::exp_raw(a.mat()));
}

HermitianMatrix matrix_log(const HpdMatrix& p) {
    return HermitianMatrix::unchecked(detail::log_raw(p.mat(), "matrix_log"));
}

HpdMatrix matrix_sqrt(const HpdMatrix& p) {
    return HpdMatrix::unchecked(detail::sqrt_raw(p.mat(), "matrix_sqrt"));
}

HpdMatrix matrix_inv(const HpdMatrix& p) {
    return HpdMatrix::unchecked(detail::inv_raw(p.mat(), "matrix_inv"));
}

HpdMatrix matrix_pow(const HpdMatrix& p, double t) {
    return HpdMatrix::unchecked(detail::pow_raw(p.mat(), t, "matrix_pow"));
}

HermitianMatrix lyapunov_solve(const HpdMatrix& p, const HermitianMatrix& a) {
    if (p.dim() != a.dim()) throw InvalidInput("lyapunov_solve: dimension mismatch");
    return HermitianMatrix::unchecked(detail::lyapunov_raw(p.mat(), a.mat()));
}

HpdMatrix geometric_midpoint(const HpdMatrix& p1, const HpdMatrix& p2) {
    if (p1.dim() != p2.dim()) throw InvalidInput("geometric_midpoint: dimension mismatch");
    return HpdMatrix::unchecked(detail::midpoint_raw(p1.mat(), p2.mat()));
}

std::vector<HermitianMatrix> hermitian_basis(int n) {
    if (n < 1) throw InvalidInput("hermitian_basis: N must be >= 1");
    std::vector<HermitianMatrix> basis;
    basis.reserve(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i) {
        CMatrix e = CMatrix::Zero(n, n);
        e(i, i) = 1.0;
        basis.push_back(HermitianMatrix::unchecked(e));
    }
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            CMatrix s = CMatrix::Zero(n, n);
            s(i, j) = inv_sqrt2;
            s(j, i) = inv_sqrt2;
            basis.push_back(HermitianMatrix::unchecked(s));
            CMatrix t = CMatrix::Zero(n, n);
            t(i, j) = Complex(0.0, inv_sqrt2);
            t(j, i) = Complex(0.0, -inv_sqrt2);
            basis.push_back(HermitianMatrix::unchecked(t));
        }
    }
    return basis;
}

double frobenius_norm(const HermitianMatrix& a) { return a.mat().norm(); }

}  // namespace mcfar
