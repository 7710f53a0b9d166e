#include "doctest.h"

#include <cmath>
#include <complex>

#include "mcfar/hermitian.hpp"
#include "mcfar/signal.hpp"
#include "test_util.hpp"

using namespace mcfar;

TEST_CASE("RngStream reproducibility and stream independence") {
    RngStream a(42, 7);
    RngStream b(42, 7);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

    RngStream c(42, 8);
    int same = 0;
    RngStream a2(42, 7);
    for (int i = 0; i < 64; ++i) same += a2.next_u64() == c.next_u64();
    CHECK(same == 0);
}

TEST_CASE("gamma sampler matches the Gamma(4,3) mean") {
    RngStream rng(4242, 0);
    const int n = 100000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += rng.gamma(4.0, 3.0);
    CHECK(std::abs(sum / n - 12.0) < 0.2);
    CHECK_THROWS_AS(rng.gamma(-1.0, 1.0), InvalidInput);
}

TEST_CASE("gamma sampler below shape 1") {
    RngStream rng(4243, 0);
    const int n = 200000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += rng.gamma(0.5, 2.0);
    CHECK(std::abs(sum / n - 1.0) < 0.05);
}

TEST_CASE("steering_ideal closed forms and unit norm") {
    Snapshot s0 = steering_ideal(4, 0.0);
    for (int k = 0; k < 4; ++k) CHECK(std::abs(s0[k] - Complex(0.5, 0.0)) < 1e-15);

    Snapshot s = steering_ideal(4, 0.25);
    const Complex want[] = {{0.5, 0.0}, {0.0, 0.5}, {-0.5, 0.0}, {0.0, -0.5}};
    for (int k = 0; k < 4; ++k) CHECK(std::abs(s[k] - want[k]) < 1e-12);

    RngStream rng(5, 0);
    for (int rep = 0; rep < 10; ++rep) {
        const int n = 2 + static_cast<int>(rng.uniform() * 12);
        CHECK(std::abs(steering_ideal(n, rng.uniform() * 0.999).norm() - 1.0) < 1e-12);
    }
    CHECK_THROWS_AS(steering_ideal(4, 1.0), InvalidInput);
}

TEST_CASE("steering_mismatched cone-angle identity") {
    RngStream rng(6, 0);
    const int n = 8;
    Snapshot s0 = steering_mismatched(n, 0.0, rng);
    CHECK(std::abs(s0[0] - Complex(1.0 / std::sqrt(8.0), 0.0)) < 1e-14);
    for (int k = 1; k < n; ++k) CHECK(std::abs(s0[k]) == 0.0);

    CVector e1 = CVector::Zero(n);
    e1[0] = 1.0;
    Snapshot s90 = steering_mismatched(n, 90.0, rng);
    CHECK(std::abs(e1.dot(s90)) < 1e-10);

    Snapshot s30 = steering_mismatched(n, 30.0, rng);
    const double cos2 = std::norm(s30.dot(e1)) / s30.squaredNorm();
    CHECK(std::abs(cos2 - 0.75) < 1e-10);

    CHECK_THROWS_AS(steering_mismatched(n, 91.0, rng), InvalidInput);
}

TEST_CASE("steering_realize is deterministic in the draw seed") {
    SteeringSpec spec = SteeringSpec::mismatched(8, 15.0, 99);
    Snapshot a = steering_realize(spec);
    Snapshot b = steering_realize(spec);
    CHECK((a - b).norm() == 0.0);
}

TEST_CASE("sigma_matrix entries") {
    ClutterParams p;
    p.N = 4;
    p.cnr_db = -std::numeric_limits<double>::infinity();  // sigma_c^2 = 0
    CHECK((sigma_matrix(p).mat() - CMatrix::Identity(4, 4)).norm() == 0.0);

    ClutterParams q;  // paper block: 20 dB, rho 0.9, fc 0.2
    q.N = 8;
    CMatrix sig = sigma_matrix(q).mat();
    CHECK(sig(0, 0).real() == doctest::Approx(101.0));
    const Complex want = 100.0 * 0.9 *
                         Complex(std::cos(2.0 * M_PI * 0.2), std::sin(2.0 * M_PI * 0.2));
    CHECK(std::abs(sig(1, 0) - want) < 1e-9);
    CHECK(std::abs(want - Complex(27.81, 85.60)) < 0.01);  // the quoted value

    // Hermitian Toeplitz with unit noise floor
    for (int i = 0; i + 1 < 8; ++i)
        for (int j = 0; j + 1 < 8; ++j) CHECK(std::abs(sig(i, j) - sig(i + 1, j + 1)) < 1e-12);
    auto eig = eig_hermitian(HermitianMatrix(sig));
    CHECK(eig.eigenvalues.minCoeff() >= 1.0 - 1e-9);
}

TEST_CASE("sample_clutter moments: Gaussian benchmark") {
    ClutterParams p;
    p.N = 4;
    p.cnr_db = -std::numeric_limits<double>::infinity();
    p.texture_on = false;
    ClutterSampler sampler(p);
    RngStream rng(77, 1);
    const int draws = 100000;
    CMatrix acc = CMatrix::Zero(4, 4);
    for (int i = 0; i < draws; ++i) {
        Snapshot z = sampler.sample(rng);
        acc += z * z.adjoint();
    }
    acc /= draws;
    CHECK((acc - CMatrix::Identity(4, 4)).norm() / 2.0 < 0.05);
}

TEST_CASE("sample_clutter moments: compound-Gaussian second moment") {
    ClutterParams p;
    p.N = 4;
    p.cnr_db = 10.0;
    ClutterSampler sampler(p);
    RngStream rng(78, 1);
    const int draws = 100000;
    CMatrix acc = CMatrix::Zero(4, 4);
    for (int i = 0; i < draws; ++i) {
        Snapshot c = sampler.sample(rng);
        acc += c * c.adjoint();
    }
    acc /= draws;
    const CMatrix want = 12.0 * sampler.sigma().mat();  // E[tau] = alpha beta = 12
    CHECK((acc - want).norm() / want.norm() < 0.05);
}

TEST_CASE("amplitude_from_scr closed forms") {
    Snapshot s = steering_ideal(4, 0.1);
    CHECK(amplitude_from_scr(0.0, s, HpdMatrix::identity(4)) == doctest::Approx(1.0));
    CHECK(amplitude_from_scr(20.0, s, HpdMatrix::identity(4)) == doctest::Approx(10.0));
    CHECK(amplitude_from_scr(0.0, s, HpdMatrix(4.0 * CMatrix::Identity(4, 4))) ==
          doctest::Approx(2.0));
}

TEST_CASE("make_observation composition") {
    ClutterParams p;
    p.N = 4;
    p.cnr_db = 5.0;
    ClutterSampler sampler(p);
    Snapshot s = steering_ideal(4, 0.2);

    // H1 at an overwhelming SCR points along s
    RngStream rng(79, 0);
    Snapshot x = make_observation(Hypothesis::H1, sampler, s, 120.0, rng);
    Snapshot xn = x / x.norm();
    CHECK(std::abs(std::abs(xn.dot(s)) - 1.0) < 1e-3);

    // H1 second moment: |a|^2 s s^H + alpha beta Sigma
    const double a = amplitude_from_scr(10.0, s, scr_reference(p));
    RngStream rng2(80, 0);
    const int draws = 100000;
    CMatrix acc = CMatrix::Zero(4, 4);
    for (int i = 0; i < draws; ++i) {
        Snapshot xi = make_observation(Hypothesis::H1, sampler, s, 10.0, rng2);
        acc += xi * xi.adjoint();
    }
    acc /= draws;
    CMatrix want = a * a * s * s.adjoint() + 12.0 * sampler.sigma().mat();
    CHECK((acc - want).norm() / want.norm() < 0.05);
}

TEST_CASE("make_secondary_set interference accounting") {
    ClutterParams p;
    p.N = 4;
    p.cnr_db = 0.0;
    p.texture_on = false;
    ClutterSampler sampler(p);

    RngStream rng(81, 0);
    auto plain = make_secondary_set(5, sampler, std::nullopt, rng);
    CHECK(plain.size() == 5);

    InterferenceSpec jam;
    jam.fi = 0.2;
    jam.inr_db = 10.0;
    jam.count = 2;
    RngStream rng2(81, 0);
    auto jammed = make_secondary_set(5, sampler, jam, rng2);
    // identical streams: the uncontaminated tail matches, the head differs
    for (int i = 2; i < 5; ++i) CHECK((jammed[i] - plain[i]).norm() == 0.0);
    for (int i = 0; i < 2; ++i) CHECK((jammed[i] - plain[i]).norm() > 0.1);

    // contaminated snapshots carry more average power
    double pj = 0.0, pc = 0.0;
    RngStream rng3(82, 0);
    for (int rep = 0; rep < 10000; ++rep) {
        auto set = make_secondary_set(2, sampler, InterferenceSpec{0.2, 10.0, 1}, rng3);
        pj += set[0].squaredNorm();
        pc += set[1].squaredNorm();
    }
    CHECK(pj > pc * 1.5);

    InterferenceSpec toomany;
    toomany.count = 9;
    RngStream rng4(83, 0);
    CHECK_THROWS_AS(make_secondary_set(5, sampler, toomany, rng4), InvalidInput);
}

TEST_CASE("autocorr_estimate closed forms") {
    Snapshot ones(4);
    ones << 1.0, 1.0, 1.0, 1.0;
    CVector r = autocorr_estimate(ones);
    CHECK(std::abs(r[0] - Complex(1.0, 0.0)) < 1e-15);
    CHECK(std::abs(r[1] - Complex(0.75, 0.0)) < 1e-15);
    CHECK(std::abs(r[2] - Complex(0.5, 0.0)) < 1e-15);
    CHECK(std::abs(r[3] - Complex(0.25, 0.0)) < 1e-15);

    Snapshot impulse(4);
    impulse << 1.0, 0.0, 0.0, 0.0;
    CVector ri = autocorr_estimate(impulse);
    CHECK(std::abs(ri[0] - Complex(0.25, 0.0)) < 1e-15);
    for (int k = 1; k < 4; ++k) CHECK(std::abs(ri[k]) == 0.0);

    RngStream rng(91, 0);
    Snapshot x = rng.complex_normal_vector(6);
    CHECK(autocorr_estimate(x)[0].real() == doctest::Approx(x.squaredNorm() / 6.0));
}

TEST_CASE("toeplitz_cov structure, loading, and phase invariance") {
    Snapshot impulse(4);
    impulse << 1.0, 0.0, 0.0, 0.0;
    CMatrix t = toeplitz_cov(impulse).mat();
    CHECK((t - 0.25 * CMatrix::Identity(4, 4)).norm() < 1e-12);

    RngStream rng(92, 0);
    Snapshot x = rng.complex_normal_vector(8);
    HpdMatrix tc = toeplitz_cov(x);
    const CMatrix& m = tc.mat();
    CVector r = autocorr_estimate(x);
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j <= i; ++j) CHECK(std::abs(m(i, j) - r[i - j]) < 1e-9);
    for (int k = 1; k < 8; ++k) CHECK(std::abs(r[k]) <= r[0].real() + 1e-12);

    const double floor = 1e-6 * m.trace().real() / 8.0;
    CHECK(eig_hermitian(tc.hermitian()).eigenvalues.minCoeff() >= floor * (1.0 - 1e-9));

    // global phase invariance
    Complex phase = std::polar(1.0, 1.234);
    CHECK((toeplitz_cov(phase * x).mat() - m).norm() < 1e-12 * m.norm());
}

TEST_CASE("scm consistency and scaling") {
    Snapshot x(3);
    x << Complex(1, 1), Complex(0, 2), Complex(-1, 0);
    CMatrix single = scm({x}).mat();
    CHECK((single - (x * x.adjoint() + single(0, 0).real() * 0.0 * CMatrix::Identity(3, 3)))
              .norm() < 1e-4 * single.norm());  // loading only nudges the diagonal

    std::vector<Snapshot> xs = {x, 2.0 * x};
    CHECK(testutil::rel_err(scm({2.0 * x}).mat(), 4.0 * scm({x}).mat()) < 1e-6);

    ClutterParams p;
    p.N = 4;
    p.cnr_db = 3.0;
    p.texture_on = false;
    ClutterSampler sampler(p);
    RngStream rng(93, 0);
    std::vector<Snapshot> draws;
    draws.reserve(100000);
    for (int i = 0; i < 100000; ++i) draws.push_back(sampler.sample(rng));
    CHECK(testutil::rel_err(scm(draws).mat(), sampler.sigma().mat()) < 0.02);

    CHECK_THROWS_AS(scm({}), InvalidInput);
}

TEST_CASE("snapshot generation is bit-identical for equal streams") {
    ClutterParams p;
    RngStream a(1234, 55), b(1234, 55);
    ClutterSampler sampler(p);
    Snapshot xa = sampler.sample(a);
    Snapshot xb = sampler.sample(b);
    for (int i = 0; i < p.N; ++i) {
        CHECK(xa[i].real() == xb[i].real());
        CHECK(xa[i].imag() == xb[i].imag());
    }
}
