#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace mcfar {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

/// Malformed arguments: dimension mismatch, empty input, out-of-range scalars.
struct InvalidInput : std::invalid_argument {
    explicit InvalidInput(const std::string& what) : std::invalid_argument(what) {}
};

/// Input outside the mathematical domain of the operation (e.g. log of a
/// non-positive-definite matrix).
struct DomainError : std::domain_error {
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// An iterative procedure failed (divergence, eigensolver breakdown, ...).
struct NumericalFailure : std::runtime_error {
    explicit NumericalFailure(const std::string& what) : std::runtime_error(what) {}
};

/// The influence-function linear system is numerically rank deficient.
struct SingularHessian : NumericalFailure {
    explicit SingularHessian(const std::string& what) : NumericalFailure(what) {}
};

/// A median sits on top of a data point; the influence computation is not defined there.
struct DegenerateMedian : NumericalFailure {
    explicit DegenerateMedian(const std::string& what) : NumericalFailure(what) {}
};

namespace detail {

/// (A + A^H)/2. Also forces the diagonal to be exactly real.
CMatrix symmetrize(const CMatrix& a);

/// Throws InvalidInput when any entry is NaN or infinite.
void require_finite(const CMatrix& a, const char* where);

}  // namespace detail

/// Complex Hermitian matrix. Construction symmetrizes, so the invariant
/// entries(i,j) == conj(entries(j,i)) holds exactly afterwards.
class HermitianMatrix {
public:
    explicit HermitianMatrix(const CMatrix& raw);

    static HermitianMatrix zero(int dim);
    static HermitianMatrix identity(int dim);
    /// Wraps a matrix that is already exactly Hermitian (library internal).
    static HermitianMatrix unchecked(CMatrix hermitian);

    int dim() const { return static_cast<int>(m_.rows()); }
    const CMatrix& mat() const { return m_; }

private:
    struct Unchecked {};
    HermitianMatrix(CMatrix m, Unchecked) : m_(std::move(m)) {}
    CMatrix m_;
};

/// Hermitian positive-definite matrix. The constructor rejects matrices whose
/// smallest eigenvalue is <= eps_pd * largest eigenvalue (default 1e-12).
class HpdMatrix {
public:
    explicit HpdMatrix(const CMatrix& raw, double eps_pd = 1e-12);

    static HpdMatrix identity(int dim);
    /// Wraps a matrix known to be HPD by construction (library internal);
    /// symmetrizes but skips the eigenvalue gate.
    static HpdMatrix unchecked(CMatrix hermitian_pd);

    int dim() const { return static_cast<int>(m_.rows()); }
    const CMatrix& mat() const { return m_; }
    HermitianMatrix hermitian() const { return HermitianMatrix::unchecked(m_); }

private:
    struct Unchecked {};
    HpdMatrix(CMatrix m, Unchecked) : m_(std::move(m)) {}
    CMatrix m_;
};

/// Eigendecomposition of a Hermitian matrix, eigenvalues in descending order.
struct EigenDecomposition {
    CMatrix unitary;      // columns are eigenvectors
    RVector eigenvalues;  // descending

    /// U * diag(values) * U^H
    CMatrix reconstruct() const;
};

}  // namespace mcfar
