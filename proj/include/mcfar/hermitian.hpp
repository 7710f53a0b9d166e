#pragma once

#include <vector>

#include "mcfar/types.hpp"

namespace mcfar {

/// Eigendecomposition of a Hermitian matrix (descending eigenvalues).
/// Throws InvalidInput on non-finite entries, NumericalFailure if the
/// eigensolver does not converge.
EigenDecomposition eig_hermitian(const HermitianMatrix& a);

/// exp of a Hermitian matrix; the result is HPD.
HpdMatrix matrix_exp(const HermitianMatrix& a);

/// Principal logarithm of an HPD matrix.
HermitianMatrix matrix_log(const HpdMatrix& p);

HpdMatrix matrix_sqrt(const HpdMatrix& p);
HpdMatrix matrix_inv(const HpdMatrix& p);
HpdMatrix matrix_pow(const HpdMatrix& p, double t);

/// Unique Hermitian X with P*X + X*P = A, computed in the eigenbasis of P
/// (entrywise division by lambda_i + lambda_j).
HermitianMatrix lyapunov_solve(const HpdMatrix& p, const HermitianMatrix& a);

/// Matrix geometric mean P1 # P2 = P1^{1/2} (P1^{-1/2} P2 P1^{-1/2})^{1/2} P1^{1/2}.
/// Symmetric in its arguments; the unique HPD solution of X P1^{-1} X = P2.
HpdMatrix geometric_midpoint(const HpdMatrix& p1, const HpdMatrix& p2);

/// Orthonormal basis of the real vector space of N x N Hermitian matrices:
/// N diagonal units, then for each i<j the pair
///   (E_ij + E_ji)/sqrt(2)  and  i(E_ij - E_ji)/sqrt(2).
std::vector<HermitianMatrix> hermitian_basis(int n);

double frobenius_norm(const HermitianMatrix& a);

namespace detail {

/// Raw eigendecomposition helper; input assumed Hermitian.
/// Returns (U, ascending eigenvalues) straight from the solver.
std::pair<CMatrix, RVector> eigh(const CMatrix& a, const char* where);

/// U * diag(f(lambda)) * U^H, re-symmetrized.
template <typename F>
CMatrix spectral_apply(const CMatrix& u, const RVector& lam, F f) {
    RVector mapped(lam.size());
    for (Eigen::Index i = 0; i < lam.size(); ++i) mapped[i] = f(lam[i]);
    return symmetrize(u * mapped.asDiagonal() * u.adjoint());
}

/// Throws DomainError unless all eigenvalues exceed eps_pd * max eigenvalue.
void require_positive(const RVector& lam, const char* what);

CMatrix exp_raw(const CMatrix& hermitian);
CMatrix log_raw(const CMatrix& hpd, const char* what);
CMatrix sqrt_raw(const CMatrix& hpd, const char* what);
CMatrix inv_raw(const CMatrix& hpd, const char* what);
CMatrix pow_raw(const CMatrix& hpd, double t, const char* what);
CMatrix lyapunov_raw(const CMatrix& p, const CMatrix& a);
CMatrix midpoint_raw(const CMatrix& p1, const CMatrix& p2);

/// A # B given eigendecompositions are not cached; convenience overloads for
/// expressions like P^{-1} # Q used by the Bures--Wasserstein formulas.
CMatrix midpoint_inv_first_raw(const CMatrix& p_inv_of, const CMatrix& q);

}  // namespace detail

}  // namespace mcfar
