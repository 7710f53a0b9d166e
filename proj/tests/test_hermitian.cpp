#include "doctest.h"

#include <cmath>

#include "mcfar/hermitian.hpp"
#include "test_util.hpp"

using namespace mcfar;
using testutil::random_hermitian;
using testutil::random_hpd;
using testutil::scalar_hpd;

TEST_CASE("HermitianMatrix symmetrizes on construction") {
    CMatrix raw(2, 2);
    raw << Complex(1.0, 1e-13), Complex(2.0, 3.0), Complex(2.0, -3.0 + 1e-13), Complex(4.0, 0.0);
    HermitianMatrix h(raw);
    CHECK((h.mat() - h.mat().adjoint()).norm() == 0.0);
    CHECK(h.mat()(0, 0).imag() == 0.0);
    CHECK(h.mat()(1, 1).imag() == 0.0);
}

TEST_CASE("HermitianMatrix rejects non-finite and non-square input") {
    CMatrix bad(2, 2);
    bad.setZero();
    bad(0, 1) = Complex(std::nan(""), 0.0);
    CHECK_THROWS_AS(HermitianMatrix{bad}, InvalidInput);
    CHECK_THROWS_AS(HermitianMatrix{CMatrix::Zero(2, 3)}, InvalidInput);
}

TEST_CASE("HpdMatrix accepts HPD and rejects indefinite or singular input") {
    RngStream rng(7, 0);
    CHECK_NOTHROW(random_hpd(rng, 5));
    CMatrix indef = CMatrix::Identity(3, 3);
    indef(2, 2) = -0.5;
    CHECK_THROWS_AS(HpdMatrix{indef}, DomainError);
    CHECK_THROWS_AS(HpdMatrix{CMatrix::Zero(3, 3)}, DomainError);
}

TEST_CASE("eig_hermitian identity and diagonal cases") {
    auto d = eig_hermitian(HermitianMatrix::identity(3));
    CHECK(d.eigenvalues.size() == 3);
    for (int i = 0; i < 3; ++i) CHECK(d.eigenvalues[i] == doctest::Approx(1.0));
    CHECK((d.unitary.adjoint() * d.unitary - CMatrix::Identity(3, 3)).norm() < 1e-12);

    CMatrix diag = CMatrix::Zero(2, 2);
    diag(0, 0) = 3.0;
    diag(1, 1) = 1.0;
    auto d2 = eig_hermitian(HermitianMatrix(diag));
    CHECK(d2.eigenvalues[0] == doctest::Approx(3.0));
    CHECK(d2.eigenvalues[1] == doctest::Approx(1.0));
    CHECK((d2.reconstruct() - diag).norm() < 1e-12);
}

TEST_CASE("eig_hermitian reconstructs random matrices") {
    RngStream rng(11, 0);
    for (int rep = 0; rep < 5; ++rep) {
        HermitianMatrix a = random_hermitian(rng, 8);
        auto d = eig_hermitian(a);
        CHECK((d.reconstruct() - a.mat()).norm() / a.mat().norm() < 1e-10);
        CHECK((d.unitary.adjoint() * d.unitary - CMatrix::Identity(8, 8)).norm() < 1e-10);
        for (int i = 0; i + 1 < 8; ++i) CHECK(d.eigenvalues[i] >= d.eigenvalues[i + 1]);
    }
}

TEST_CASE("matrix functions: diagonal closed forms") {
    CHECK(matrix_log(HpdMatrix::identity(3)).mat().norm() == doctest::Approx(0.0));

    CMatrix d49 = CMatrix::Zero(2, 2);
    d49(0, 0) = 4.0;
    d49(1, 1) = 9.0;
    CMatrix root = matrix_sqrt(HpdMatrix(d49)).mat();
    CHECK(root(0, 0).real() == doctest::Approx(2.0));
    CHECK(root(1, 1).real() == doctest::Approx(3.0));

    CMatrix d28 = CMatrix::Zero(2, 2);
    d28(0, 0) = 2.0;
    d28(1, 1) = 8.0;
    HpdMatrix p(d28);
    CMatrix twice = matrix_pow(matrix_pow(p, 0.5), 0.5).mat();
    CMatrix quarter = matrix_pow(p, 0.25).mat();
    CHECK((twice - quarter).norm() < 1e-10);
    CHECK((matrix_pow(p, 1.0).mat() - d28).norm() < 1e-12);
}

TEST_CASE("exp/log round trips") {
    RngStream rng(13, 0);
    for (int rep = 0; rep < 5; ++rep) {
        HpdMatrix p = random_hpd(rng, 6);
        CHECK(testutil::rel_err(matrix_exp(matrix_log(p)).mat(), p.mat()) < 1e-9);
        HermitianMatrix h = random_hermitian(rng, 6);
        CHECK((matrix_log(matrix_exp(h)).mat() - h.mat()).norm() / (1.0 + h.mat().norm()) < 1e-9);
    }
}

TEST_CASE("matrix functions preserve Hermitian symmetry exactly") {
    RngStream rng(17, 0);
    HpdMatrix p = random_hpd(rng, 5);
    for (const CMatrix& x : {matrix_log(p).mat(), matrix_sqrt(p).mat(), matrix_inv(p).mat(),
                             matrix_pow(p, 0.3).mat()}) {
        CHECK((x - x.adjoint()).norm() == 0.0);
    }
}

TEST_CASE("lyapunov_solve closed forms and residuals") {
    // P = I: X = A/2
    RngStream rng(19, 0);
    HermitianMatrix a = random_hermitian(rng, 4);
    CMatrix x = lyapunov_solve(HpdMatrix::identity(4), a).mat();
    CHECK((x - 0.5 * a.mat()).norm() < 1e-12);

    // P = diag(1,3), A = ones: entrywise 1/(lambda_i + lambda_j)
    CMatrix p = CMatrix::Zero(2, 2);
    p(0, 0) = 1.0;
    p(1, 1) = 3.0;
    CMatrix ones = CMatrix::Ones(2, 2);
    CMatrix want(2, 2);
    want << 0.5, 0.25, 0.25, 1.0 / 6.0;
    CHECK((lyapunov_solve(HpdMatrix(p), HermitianMatrix(ones)).mat() - want).norm() < 1e-12);

    for (int n : {8, 16}) {
        HpdMatrix pp = random_hpd(rng, n);
        HermitianMatrix aa = random_hermitian(rng, n);
        CMatrix xx = lyapunov_solve(pp, aa).mat();
        const double resid = (pp.mat() * xx + xx * pp.mat() - aa.mat()).norm() / aa.mat().norm();
        CHECK(resid < 1e-10);
    }
}

TEST_CASE("geometric_midpoint properties") {
    RngStream rng(23, 0);
    HpdMatrix a = random_hpd(rng, 4);
    CHECK(testutil::rel_err(geometric_midpoint(a, a).mat(), a.mat()) < 1e-12);

    CHECK(geometric_midpoint(scalar_hpd(2.0), scalar_hpd(8.0)).mat()(0, 0).real() ==
          doctest::Approx(4.0));

    HpdMatrix p1 = random_hpd(rng, 8);
    HpdMatrix p2 = random_hpd(rng, 8);
    CMatrix x = geometric_midpoint(p1, p2).mat();
    // Riccati equation X P1^{-1} X = P2
    CMatrix resid = x * matrix_inv(p1).mat() * x - p2.mat();
    CHECK(resid.norm() / p2.mat().norm() < 1e-8);
    // symmetry in the arguments
    CHECK(testutil::rel_err(x, geometric_midpoint(p2, p1).mat()) < 1e-8);

    CHECK_THROWS_AS(geometric_midpoint(p1, random_hpd(rng, 4)), InvalidInput);
}

TEST_CASE("hermitian_basis is orthonormal and complete") {
    CHECK_THROWS_AS(hermitian_basis(0), InvalidInput);

    auto b1 = hermitian_basis(1);
    REQUIRE(b1.size() == 1);
    CHECK(b1[0].mat()(0, 0).real() == doctest::Approx(1.0));

    for (int n : {2, 8}) {
        auto basis = hermitian_basis(n);
        REQUIRE(static_cast<int>(basis.size()) == n * n);
        for (std::size_t i = 0; i < basis.size(); ++i) {
            for (std::size_t j = 0; j < basis.size(); ++j) {
                const double g = (basis[i].mat() * basis[j].mat()).trace().real();
                CHECK(std::abs(g - (i == j ? 1.0 : 0.0)) < 1e-12);
            }
        }
    }
}

TEST_CASE("frobenius_norm") {
    CHECK(frobenius_norm(HermitianMatrix::zero(3)) == 0.0);
    CHECK(frobenius_norm(HermitianMatrix::identity(4)) == doctest::Approx(2.0));
    CMatrix d = CMatrix::Zero(2, 2);
    d(0, 0) = 3.0;
    d(1, 1) = 4.0;
    CHECK(frobenius_norm(HermitianMatrix(d)) == doctest::Approx(5.0));
}
