#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "mcfar/averaging.hpp"
#include "mcfar/hermitian.hpp"
#include "test_util.hpp"

using namespace mcfar;
using testutil::random_complex;
using testutil::random_hpd;
using testutil::scalar_hpd;

namespace {

std::vector<HpdMatrix> scalars(std::initializer_list<double> vs) {
    std::vector<HpdMatrix> out;
    for (double v : vs) out.push_back(scalar_hpd(v));
    return out;
}

std::vector<HpdMatrix> random_set(RngStream& rng, int count, int n) {
    std::vector<HpdMatrix> out;
    for (int i = 0; i < count; ++i) out.push_back(random_hpd(rng, n));
    return out;
}

double scalar_of(const SolverReport& rep) { return rep.result.mat()(0, 0).real(); }

// 1-D Weiszfeld oracle for the geometric median of positive scalars in a
// given coordinate chart (log for AIRM/LE, sqrt for BW).
double weiszfeld_1d(std::vector<double> coords) {
    double x = std::accumulate(coords.begin(), coords.end(), 0.0) / coords.size();
    for (int it = 0; it < 100000; ++it) {
        double num = 0.0, den = 0.0;
        for (double c : coords) {
            const double d = std::abs(c - x);
            if (d < 1e-14) continue;
            num += c / d;
            den += 1.0 / d;
        }
        if (den == 0.0) break;
        const double next = num / den;
        if (std::abs(next - x) < 1e-13) {
            x = next;
            break;
        }
        x = next;
    }
    return x;
}

// brute-force grid oracle for the 1-D BW median objective sum |sqrt(r)-sqrt(ri)|
double bw_median_grid_oracle(const std::vector<double>& rs, double lo, double hi) {
    double best = lo, best_val = 1e300;
    for (int k = 0; k <= 200000; ++k) {
        const double r = lo + (hi - lo) * k / 200000.0;
        double val = 0.0;
        for (double ri : rs) val += std::abs(std::sqrt(r) - std::sqrt(ri));
        if (val < best_val) {
            best_val = val;
            best = r;
        }
    }
    return best;
}

SolverConfig tight(double tol = 1e-9) {
    SolverConfig cfg;
    cfg.tol = tol;
    return cfg;
}

}  // namespace

TEST_CASE("arithmetic_mean basics") {
    RngStream rng(101, 0);
    HpdMatrix a = random_hpd(rng, 3);
    CHECK(testutil::rel_err(arithmetic_mean({a}).mat(), a.mat()) == 0.0);

    CMatrix d1 = CMatrix::Identity(2, 2);
    CMatrix d3 = 3.0 * CMatrix::Identity(2, 2);
    CMatrix mean = arithmetic_mean({HpdMatrix(d1), HpdMatrix(d3)}).mat();
    CHECK((mean - 2.0 * CMatrix::Identity(2, 2)).norm() < 1e-14);

    CHECK_THROWS_AS(arithmetic_mean({}), InvalidInput);

    auto ms = random_set(rng, 5, 4);
    SolverReport rep = solve({ms, MetricKind::Euclidean, Statistic::Mean});
    CHECK(testutil::rel_err(rep.result.mat(), arithmetic_mean(ms).mat()) < 1e-10);
}

TEST_CASE("airm_mean: identical inputs, scalars, two-point midpoint") {
    RngStream rng(103, 0);
    HpdMatrix a = random_hpd(rng, 4);
    SolverReport rep = airm_mean({a, a, a});
    CHECK(rep.converged);
    CHECK(rep.iterations <= 1);
    CHECK(testutil::rel_err(rep.result.mat(), a.mat()) < 1e-12);

    CHECK(scalar_of(airm_mean(scalars({1.0, 4.0}), tight())) == doctest::Approx(2.0).epsilon(1e-8));

    HpdMatrix p1 = random_hpd(rng, 5);
    HpdMatrix p2 = random_hpd(rng, 5);
    SolverReport two = airm_mean({p1, p2}, tight());
    CHECK(testutil::rel_err(two.result.mat(), geometric_midpoint(p1, p2).mat()) < 1e-6);
}

TEST_CASE("airm_mean: Karcher stationarity at convergence") {
    RngStream rng(107, 0);
    auto ms = random_set(rng, 6, 4);
    SolverConfig cfg;
    cfg.tol = 1e-6;
    SolverReport rep = airm_mean(ms, cfg);
    CHECK(rep.converged);
    CHECK(rep.stationarity_residual < 10.0 * cfg.tol);
}

TEST_CASE("airm_mean: congruence and scaling equivariance") {
    RngStream rng(109, 0);
    auto ms = random_set(rng, 4, 4);
    SolverReport base = airm_mean(ms, tight());

    CMatrix g = random_complex(rng, 4, 4) + 2.0 * CMatrix::Identity(4, 4);
    std::vector<HpdMatrix> conj;
    for (const auto& m : ms) conj.push_back(HpdMatrix(g.adjoint() * m.mat() * g));
    SolverReport moved = airm_mean(conj, tight());
    CHECK(testutil::rel_err(moved.result.mat(), g.adjoint() * base.result.mat() * g) < 1e-5);

    std::vector<HpdMatrix> scaled;
    for (const auto& m : ms) scaled.push_back(HpdMatrix(3.7 * m.mat()));
    SolverReport srep = airm_mean(scaled, tight());
    CHECK(testutil::rel_err(srep.result.mat(), 3.7 * base.result.mat()) < 1e-6);
}

TEST_CASE("airm_median: scalar oracle and majority point") {
    const double e1 = std::exp(1.0), e4 = std::exp(4.0);
    SolverReport rep = airm_median(scalars({1.0, e1, e4}), tight());
    const double oracle = std::exp(weiszfeld_1d({0.0, 1.0, 4.0}));
    CHECK(scalar_of(rep) == doctest::Approx(oracle).epsilon(1e-6));
    CHECK(scalar_of(rep) == doctest::Approx(e1).epsilon(1e-6));

    RngStream rng(113, 0);
    HpdMatrix p = random_hpd(rng, 4);
    HpdMatrix q = random_hpd(rng, 4);
    SolverReport maj = airm_median({p, p, q}, tight(1e-10));
    CHECK((maj.result.mat() - p.mat()).norm() / p.mat().norm() < 1e-6);

    HpdMatrix a = random_hpd(rng, 3);
    SolverReport same = airm_median({a, a, a, a});
    CHECK(testutil::rel_err(same.result.mat(), a.mat()) < 1e-10);
}

TEST_CASE("airm: mean and median coincide for m <= 2") {
    RngStream rng(127, 0);
    HpdMatrix p1 = random_hpd(rng, 4);
    HpdMatrix p2 = random_hpd(rng, 4);
    SolverReport mean2 = airm_mean({p1, p2}, tight());
    SolverReport med2 = airm_median({p1, p2}, tight());
    CHECK(testutil::rel_err(med2.result.mat(), mean2.result.mat()) < 1e-8);
}

TEST_CASE("le_mean closed form") {
    RngStream rng(131, 0);
    HpdMatrix a = random_hpd(rng, 4);
    CHECK(testutil::rel_err(le_mean({a, a}).mat(), a.mat()) < 1e-12);

    CHECK(le_mean(scalars({1.0, 4.0})).mat()(0, 0).real() == doctest::Approx(2.0).epsilon(1e-12));

    CMatrix da = CMatrix::Zero(2, 2), db = CMatrix::Zero(2, 2);
    da(0, 0) = 1.0;
    da(1, 1) = 8.0;
    db(0, 0) = 4.0;
    db(1, 1) = 2.0;
    CMatrix got = le_mean({HpdMatrix(da), HpdMatrix(db)}).mat();
    CHECK(got(0, 0).real() == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(got(1, 1).real() == doctest::Approx(4.0).epsilon(1e-12));

    // matches the Euclidean-mean-of-logs construction
    auto ms = random_set(rng, 5, 4);
    CMatrix acc = CMatrix::Zero(4, 4);
    for (const auto& m : ms) acc += matrix_log(m).mat();
    CMatrix want = matrix_exp(HermitianMatrix(acc / 5.0)).mat();
    CHECK(testutil::rel_err(le_mean(ms).mat(), want) < 1e-10);
}

TEST_CASE("le_median: short-circuit, scalar oracle, permutation invariance") {
    RngStream rng(137, 0);
    HpdMatrix a = random_hpd(rng, 3);
    SolverReport same = le_median({a, a, a});
    CHECK(same.converged);
    CHECK(same.iterations == 0);
    CHECK(testutil::rel_err(same.result.mat(), a.mat()) < 1e-12);

    const double e1 = std::exp(1.0), e2 = std::exp(2.0);
    SolverReport rep = le_median(scalars({1.0, e1, e2}), tight());
    CHECK(scalar_of(rep) == doctest::Approx(std::exp(weiszfeld_1d({0.0, 1.0, 2.0}))).epsilon(1e-6));

    auto ms = random_set(rng, 6, 4);
    SolverReport fwd = le_median(ms, tight());
    std::vector<HpdMatrix> rev(ms.rbegin(), ms.rend());
    SolverReport bwd = le_median(rev, tight());
    CHECK(testutil::rel_err(bwd.result.mat(), fwd.result.mat()) < 1e-6);
}

TEST_CASE("bw means: identical inputs and scalar barycenter") {
    RngStream rng(139, 0);
    HpdMatrix a = random_hpd(rng, 4);
    for (auto* solver : {&bw_mean_fixed_a, &bw_mean_fixed_b, &bw_mean_rgd}) {
        SolverReport rep = (*solver)({a, a}, SolverConfig{});
        CHECK(rep.converged);
        CHECK(testutil::rel_err(rep.result.mat(), a.mat()) < 1e-10);
    }
    // ((sqrt(1)+sqrt(9))/2)^2 = 4
    for (auto* solver : {&bw_mean_fixed_a, &bw_mean_fixed_b, &bw_mean_rgd}) {
        SolverReport rep = (*solver)(scalars({1.0, 9.0}), tight());
        CHECK(scalar_of(rep) == doctest::Approx(4.0).epsilon(1e-8));
    }
}

TEST_CASE("bw means agree pairwise on random sets and satisfy stationarity") {
    RngStream rng(149, 0);
    auto ms = random_set(rng, 10, 8);
    SolverConfig cfg;
    cfg.tol = 1e-5;
    SolverReport ra = bw_mean_fixed_a(ms, cfg);
    SolverReport rb = bw_mean_fixed_b(ms, cfg);
    SolverReport rg = bw_mean_rgd(ms, cfg);
    CHECK(ra.converged);
    CHECK(rb.converged);
    CHECK(rg.converged);
    CHECK(testutil::rel_err(ra.result.mat(), rb.result.mat()) < 1e-3);
    CHECK(testutil::rel_err(rb.result.mat(), rg.result.mat()) < 1e-3);
    CHECK(testutil::rel_err(ra.result.mat(), rg.result.mat()) < 1e-3);
    CHECK(ra.stationarity_residual < 1e-3);
    CHECK(rb.stationarity_residual < 1e-3);
    CHECK(rg.stationarity_residual < 1e-3);
    // the gradient-descent iteration dominates the plain fixed point
    CHECK(rg.iterations <= ra.iterations);
}

TEST_CASE("bw_median: scalar grid oracle and majority point") {
    SolverReport rep = bw_median_rgd(scalars({1.0, 4.0, 16.0}), tight());
    const double oracle = bw_median_grid_oracle({1.0, 4.0, 16.0}, 0.5, 20.0);
    CHECK(scalar_of(rep) == doctest::Approx(4.0).epsilon(1e-6));
    CHECK(std::abs(scalar_of(rep) - oracle) < 1e-3);  // grid resolution bound

    RngStream rng(151, 0);
    HpdMatrix p = random_hpd(rng, 4);
    HpdMatrix q = random_hpd(rng, 4);
    SolverReport maj = bw_median_rgd({p, p, q}, tight(1e-10));
    CHECK((maj.result.mat() - p.mat()).norm() / p.mat().norm() < 1e-6);

    HpdMatrix a = random_hpd(rng, 3);
    SolverReport same = bw_median_rgd({a, a, a});
    CHECK(testutil::rel_err(same.result.mat(), a.mat()) < 1e-10);
}

TEST_CASE("bw scaling equivariance (mean and median)") {
    RngStream rng(157, 0);
    auto ms = random_set(rng, 5, 3);
    const double c = 2.5;
    std::vector<HpdMatrix> scaled;
    for (const auto& m : ms) scaled.push_back(HpdMatrix(c * m.mat()));

    SolverReport mean_base = bw_mean_rgd(ms, tight());
    SolverReport mean_scaled = bw_mean_rgd(scaled, tight());
    CHECK(testutil::rel_err(mean_scaled.result.mat(), c * mean_base.result.mat()) < 1e-6);

    SolverReport med_base = bw_median_rgd(ms, tight());
    SolverReport med_scaled = bw_median_rgd(scaled, tight());
    CHECK(testutil::rel_err(med_scaled.result.mat(), c * med_base.result.mat()) < 1e-6);
}

TEST_CASE("permutation invariance of every solver") {
    RngStream rng(163, 0);
    auto ms = random_set(rng, 7, 3);
    std::vector<HpdMatrix> perm = ms;
    std::rotate(perm.begin(), perm.begin() + 3, perm.end());
    std::swap(perm[0], perm[4]);

    auto check_pair = [&](const SolverReport& x, const SolverReport& y) {
        CHECK(testutil::rel_err(x.result.mat(), y.result.mat()) < 1e-6);
    };
    check_pair(airm_mean(ms, tight()), airm_mean(perm, tight()));
    check_pair(airm_median(ms, tight()), airm_median(perm, tight()));
    check_pair(le_median(ms, tight()), le_median(perm, tight()));
    check_pair(bw_mean_fixed_a(ms, tight()), bw_mean_fixed_a(perm, tight()));
    check_pair(bw_mean_fixed_b(ms, tight()), bw_mean_fixed_b(perm, tight()));
    check_pair(bw_mean_rgd(ms, tight()), bw_mean_rgd(perm, tight()));
    check_pair(bw_median_rgd(ms, tight()), bw_median_rgd(perm, tight()));
    check_pair(euclidean_median(ms, tight()), euclidean_median(perm, tight()));
    CHECK(testutil::rel_err(le_mean(ms).mat(), le_mean(perm).mat()) < 1e-10);
    CHECK(testutil::rel_err(arithmetic_mean(ms).mat(), arithmetic_mean(perm).mat()) < 1e-12);
}

TEST_CASE("objective decreases along accepted steps of the descent solvers") {
    RngStream rng(167, 0);
    auto ms = random_set(rng, 6, 4);
    for (const SolverReport& rep :
         {airm_mean(ms, tight()), airm_median(ms, tight()), bw_mean_rgd(ms, tight()),
          bw_median_rgd(ms, tight())}) {
        REQUIRE(rep.objective_trace.size() >= 2);
        for (std::size_t i = 0; i + 1 < rep.objective_trace.size(); ++i)
            CHECK(rep.objective_trace[i + 1] <= rep.objective_trace[i] + 1e-12);
    }
}

TEST_CASE("mean and median coincide for m <= 2 under every metric") {
    RngStream rng(173, 0);
    HpdMatrix p1 = random_hpd(rng, 3);
    HpdMatrix p2 = random_hpd(rng, 3);
    for (MetricKind kind :
         {MetricKind::AIRM, MetricKind::LE, MetricKind::BW, MetricKind::Euclidean}) {
        SolverReport mean = solve({{p1, p2}, kind, Statistic::Mean}, tight());
        SolverReport median = solve({{p1, p2}, kind, Statistic::Median}, tight());
        CHECK(testutil::rel_err(median.result.mat(), mean.result.mat()) < 1e-7);
    }
}

TEST_CASE("solve dispatch and convergence smoke test") {
    RngStream rng(179, 0);
    auto ms = random_set(rng, 10, 8);
    SolverConfig cfg;
    cfg.tol = 1e-3;
    SolverReport rep = solve({ms, MetricKind::AIRM, Statistic::Mean}, cfg);
    CHECK(rep.converged);
    CHECK(rep.final_delta <= cfg.tol);

    SolverReport le = solve({ms, MetricKind::LE, Statistic::Mean}, cfg);
    CHECK(testutil::rel_err(le.result.mat(), le_mean(ms).mat()) == 0.0);
}

TEST_CASE("non-convergence is reported, not thrown") {
    RngStream rng(181, 0);
    auto ms = random_set(rng, 6, 4);
    SolverConfig cfg;
    cfg.tol = 1e-14;
    cfg.max_iter = 1;
    SolverReport rep = airm_mean(ms, cfg);
    CHECK_FALSE(rep.converged);
    CHECK(rep.iterations == 1);
    CHECK(rep.final_delta > cfg.tol);
}

TEST_CASE("solver input validation") {
    CHECK_THROWS_AS(airm_mean({}), InvalidInput);
    RngStream rng(191, 0);
    std::vector<HpdMatrix> bad = {random_hpd(rng, 3), random_hpd(rng, 4)};
    CHECK_THROWS_AS(airm_mean(bad), InvalidInput);
    SolverConfig cfg;
    cfg.tol = -1.0;
    CHECK_THROWS_AS(airm_mean({random_hpd(rng, 3)}, cfg), InvalidInput);
}
