#include "mcfar/types.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace mcfar {

namespace detail {

CMatrix symmetrize(const CMatrix& a) {
    CMatrix s = 0.5 * (a + a.adjoint());
    for (Eigen::Index i = 0; i < s.rows(); ++i) s(i, i) = Complex(s(i, i).real(), 0.0);
    return s;
}

void require_finite(const CMatrix& a, const char* where) {
    if (!a.allFinite()) throw InvalidInput(std::string(where) + ": non-finite entries");
}

}  // namespace detail

static void require_square_nonempty(const CMatrix& a, const char* where) {
    if (a.rows() == 0 || a.rows() != a.cols())
        throw InvalidInput(std::string(where) + ": matrix must be square and non-empty");
}

HermitianMatrix::HermitianMatrix(const CMatrix& raw) : m_() {
    require_square_nonempty(raw, "HermitianMatrix");
    detail::require_finite(raw, "HermitianMatrix");
    m_ = detail::symmetrize(raw);
}

HermitianMatrix HermitianMatrix::zero(int dim) {
    if (dim < 1) throw InvalidInput("HermitianMatrix::zero: dim must be >= 1");
    return HermitianMatrix(CMatrix::Zero(dim, dim), Unchecked{});
}

HermitianMatrix HermitianMatrix::identity(int dim) {
    if (dim < 1) throw InvalidInput("HermitianMatrix::identity: dim must be >= 1");
    return HermitianMatrix(CMatrix::Identity(dim, dim), Unchecked{});
}

HermitianMatrix HermitianMatrix::unchecked(CMatrix hermitian) {
    return HermitianMatrix(std::move(hermitian), Unchecked{});
}

HpdMatrix::HpdMatrix(const CMatrix& raw, double eps_pd) : m_() {
    require_square_nonempty(raw, "HpdMatrix");
    detail::require_finite(raw, "HpdMatrix");
    m_ = detail::symmetrize(raw);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(m_, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericalFailure("HpdMatrix: eigensolver failed");
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    if (!(lo > eps_pd * hi) || hi <= 0.0)
        throw DomainError("HpdMatrix: not positive definite (min eigenvalue " +
                          std::to_string(lo) + ", max " + std::to_string(hi) + ")");
}

HpdMatrix HpdMatrix::identity(int dim) {
    if (dim < 1) throw InvalidInput("HpdMatrix::identity: dim must be >= 1");
    return HpdMatrix(CMatrix::Identity(dim, dim), Unchecked{});
}

HpdMatrix HpdMatrix::unchecked(CMatrix hermitian_pd) {
    return HpdMatrix(detail::symmetrize(hermitian_pd), Unchecked{});
}

CMatrix EigenDecomposition::reconstruct() const {
    return unitary * eigenvalues.asDiagonal() * unitary.adjoint();
}

}  // namespace mcfar
