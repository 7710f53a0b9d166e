#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mcfar/averaging.hpp"
#include "mcfar/detectors.hpp"
#include "mcfar/hermitian.hpp"
#include "mcfar/metrics.hpp"
#include "mcfar/montecarlo.hpp"
#include "mcfar/signal.hpp"

namespace py = pybind11;
using namespace mcfar;

namespace {

HpdMatrix as_hpd(const CMatrix& m) { return HpdMatrix(m); }

std::vector<HpdMatrix> as_hpd_list(const std::vector<CMatrix>& ms) {
    std::vector<HpdMatrix> out;
    out.reserve(ms.size());
    for (const auto& m : ms) out.emplace_back(m);
    return out;
}

SolverConfig make_cfg(double tol, int max_iter) {
    SolverConfig cfg;
    cfg.tol = tol;
    cfg.max_iter = max_iter;
    return cfg;
}

py::dict report_dict(const SolverReport& rep) {
    py::dict d;
    d["result"] = rep.result.mat();
    d["iterations"] = rep.iterations;
    d["converged"] = rep.converged;
    d["final_delta"] = rep.final_delta;
    d["stationarity_residual"] = rep.stationarity_residual;
    d["objective_trace"] = rep.objective_trace;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Riemannian geometry of HPD matrices and matrix-CFAR detection statistics";

    py::register_exception<InvalidInput>(m, "InvalidInput", PyExc_ValueError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<NumericalFailure>(m, "NumericalFailure", PyExc_RuntimeError);

    // matrix kernel
    m.def("matrix_exp", [](const CMatrix& a) { return matrix_exp(HermitianMatrix(a)).mat(); },
          py::arg("a"));
    m.def("matrix_log", [](const CMatrix& p) { return matrix_log(as_hpd(p)).mat(); }, py::arg("p"));
    m.def("matrix_sqrt", [](const CMatrix& p) { return matrix_sqrt(as_hpd(p)).mat(); },
          py::arg("p"));
    m.def("matrix_inv", [](const CMatrix& p) { return matrix_inv(as_hpd(p)).mat(); }, py::arg("p"));
    m.def("matrix_pow",
          [](const CMatrix& p, double t) { return matrix_pow(as_hpd(p), t).mat(); }, py::arg("p"),
          py::arg("t"));
    m.def("lyapunov_solve",
          [](const CMatrix& p, const CMatrix& a) {
              return lyapunov_solve(as_hpd(p), HermitianMatrix(a)).mat();
          },
          py::arg("p"), py::arg("a"), "Solve P X + X P = A for Hermitian X.");
    m.def("geometric_midpoint",
          [](const CMatrix& p1, const CMatrix& p2) {
              return geometric_midpoint(as_hpd(p1), as_hpd(p2)).mat();
          },
          py::arg("p1"), py::arg("p2"), "Matrix geometric mean P1 # P2.");
    m.def("hermitian_basis", [](int n) {
        std::vector<CMatrix> out;
        for (const auto& e : hermitian_basis(n)) out.push_back(e.mat());
        return out;
    });

    // metrics
    m.def("distance",
          [](const std::string& kind, const CMatrix& p1, const CMatrix& p2) {
              return distance(metric_from_name(kind), as_hpd(p1), as_hpd(p2));
          },
          py::arg("kind"), py::arg("p1"), py::arg("p2"),
          "Geodesic distance; kind is one of 'airm', 'le', 'bw', 'euclidean'.");
    m.def("geodesic",
          [](const std::string& kind, const CMatrix& p1, const CMatrix& p2, double t) {
              return geodesic(metric_from_name(kind), as_hpd(p1), as_hpd(p2), t).mat();
          },
          py::arg("kind"), py::arg("p1"), py::arg("p2"), py::arg("t"));
    m.def("exp_map",
          [](const std::string& kind, const CMatrix& p, const CMatrix& v) {
              return exp_map(metric_from_name(kind), as_hpd(p), HermitianMatrix(v)).mat();
          },
          py::arg("kind"), py::arg("p"), py::arg("v"));
    m.def("log_map",
          [](const std::string& kind, const CMatrix& p1, const CMatrix& p2) {
              return log_map(metric_from_name(kind), as_hpd(p1), as_hpd(p2)).mat();
          },
          py::arg("kind"), py::arg("p1"), py::arg("p2"));
    m.def("grad_sq_dist",
          [](const std::string& kind, const CMatrix& pref, const CMatrix& r) {
              return grad_sq_dist(metric_from_name(kind), as_hpd(pref), as_hpd(r)).mat();
          },
          py::arg("kind"), py::arg("pref"), py::arg("r"));
    m.def("metric_inner",
          [](const std::string& kind, const CMatrix& p, const CMatrix& a, const CMatrix& b) {
              return metric_inner(metric_from_name(kind), as_hpd(p), HermitianMatrix(a),
                                  HermitianMatrix(b));
          },
          py::arg("kind"), py::arg("p"), py::arg("a"), py::arg("b"));

    // averaging
    m.def("arithmetic_mean",
          [](const std::vector<CMatrix>& ms) { return arithmetic_mean(as_hpd_list(ms)).mat(); });
    m.def("le_mean", [](const std::vector<CMatrix>& ms) { return le_mean(as_hpd_list(ms)).mat(); });
    m.def("solve_average",
          [](const std::vector<CMatrix>& ms, const std::string& kind, const std::string& stat,
             double tol, int max_iter) {
              AveragingProblem problem{as_hpd_list(ms), metric_from_name(kind),
                                       statistic_from_name(stat)};
              return report_dict(solve(problem, make_cfg(tol, max_iter)));
          },
          py::arg("matrices"), py::arg("kind"), py::arg("statistic"), py::arg("tol") = 1e-3,
          py::arg("max_iter") = 500,
          "Geometric mean or median of HPD matrices under the chosen metric.");
    m.def("bw_mean_fixed_a",
          [](const std::vector<CMatrix>& ms, double tol, int max_iter) {
              return report_dict(bw_mean_fixed_a(as_hpd_list(ms), make_cfg(tol, max_iter)));
          },
          py::arg("matrices"), py::arg("tol") = 1e-5, py::arg("max_iter") = 500);
    m.def("bw_mean_fixed_b",
          [](const std::vector<CMatrix>& ms, double tol, int max_iter) {
              return report_dict(bw_mean_fixed_b(as_hpd_list(ms), make_cfg(tol, max_iter)));
          },
          py::arg("matrices"), py::arg("tol") = 1e-5, py::arg("max_iter") = 500);
    m.def("bw_mean_rgd",
          [](const std::vector<CMatrix>& ms, double tol, int max_iter) {
              return report_dict(bw_mean_rgd(as_hpd_list(ms), make_cfg(tol, max_iter)));
          },
          py::arg("matrices"), py::arg("tol") = 1e-5, py::arg("max_iter") = 500);

    // signal simulation and covariance estimation
    m.def("steering_ideal", &steering_ideal, py::arg("n"), py::arg("fd"));
    m.def("sigma_matrix",
          [](int n, double cnr_db, double rho, double fc) {
              ClutterParams p;
              p.N = n;
              p.cnr_db = cnr_db;
              p.rho = rho;
              p.fc = fc;
              return sigma_matrix(p).mat();
          },
          py::arg("n"), py::arg("cnr_db") = 20.0, py::arg("rho") = 0.9, py::arg("fc") = 0.2);
    m.def("autocorr_estimate", &autocorr_estimate, py::arg("x"));
    m.def("toeplitz_cov", [](const CVector& x) { return toeplitz_cov(x).mat(); }, py::arg("x"));
    m.def("scm", [](const std::vector<CVector>& xs) { return scm(xs).mat(); }, py::arg("snapshots"));
    m.def("sample_clutter",
          [](int n, double cnr_db, double rho, double fc, double alpha, double beta, bool texture,
             std::uint64_t seed, std::uint64_t stream) {
              ClutterParams p;
              p.N = n;
              p.cnr_db = cnr_db;
              p.rho = rho;
              p.fc = fc;
              p.shape_alpha = alpha;
              p.scale_beta = beta;
              p.texture_on = texture;
              RngStream rng(seed, stream);
              return sample_clutter(p, rng);
          },
          py::arg("n"), py::arg("cnr_db") = 20.0, py::arg("rho") = 0.9, py::arg("fc") = 0.2,
          py::arg("shape_alpha") = 4.0, py::arg("scale_beta") = 3.0, py::arg("texture") = true,
          py::arg("seed") = 0, py::arg("stream") = 0);

    // detectors
    m.def("amf_stat",
          [](const CVector& x, const CVector& s, const CMatrix& r) {
              return amf_stat(x, s, as_hpd(r));
          },
          py::arg("x"), py::arg("s"), py::arg("rhat"));
    m.def("anmf_stat",
          [](const CVector& x, const CVector& s, const CMatrix& r) {
              return anmf_stat(x, s, as_hpd(r));
          },
          py::arg("x"), py::arg("s"), py::arg("rhat"));
    m.def("matrix_cfar_stat",
          [](const CMatrix& rg, const CMatrix& rcut, const std::string& kind) {
              return matrix_cfar_stat(as_hpd(rg), as_hpd(rcut), metric_from_name(kind));
          },
          py::arg("rg"), py::arg("rcut"), py::arg("kind"));
    m.def("geometric_amf_stat",
          [](const CVector& x, const CVector& s, const CMatrix& rg) {
              return geometric_amf_stat(x, s, as_hpd(rg));
          },
          py::arg("x"), py::arg("s"), py::arg("rg"));

    m.def("bench_bw_solvers",
          [](int count_m, int n, double tol, std::uint64_t seed) {
              BenchReport report = bench_bw_solvers(count_m, n, tol, seed);
              py::list out;
              for (const auto& s : report.solvers) {
                  py::dict d;
                  d["solver"] = s.solver;
                  d["iterations"] = s.iterations;
                  d["seconds"] = s.seconds;
                  d["converged"] = s.converged;
                  out.append(d);
              }
              return out;
          },
          py::arg("count_m") = 10, py::arg("n") = 8, py::arg("tol") = 1e-5, py::arg("seed") = 0);

#ifdef MCFAR_VERSION
    m.attr("__version__") = MCFAR_VERSION;
#else
    m.attr("__version__") = "dev";
#endif
}
