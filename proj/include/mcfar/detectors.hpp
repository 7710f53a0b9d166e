#pragma once

#include <string>

#include "mcfar/averaging.hpp"
#include "mcfar/metrics.hpp"
#include "mcfar/signal.hpp"
#include "mcfar/types.hpp"

namespace mcfar {

/// Which test statistic a detector computes. The matrix-CFAR and geometric
/// AMF variants carry the averaging choice used to build R_g.
struct DetectorSpec {
    enum class Family { AMF, ANMF, MatrixCFAR, GeometricAMF };
    Family family = Family::AMF;
    MetricKind metric = MetricKind::AIRM;   // MatrixCFAR / GeometricAMF only
    Statistic statistic = Statistic::Mean;  // MatrixCFAR / GeometricAMF only

    static DetectorSpec amf();
    static DetectorSpec anmf();
    static DetectorSpec matrix_cfar(MetricKind metric, Statistic statistic);
    static DetectorSpec geometric_amf(MetricKind metric, Statistic statistic);

    bool uses_scm() const { return family == Family::AMF || family == Family::ANMF; }
    bool uses_geometric_average() const { return !uses_scm(); }
    bool uses_steering() const { return family != Family::MatrixCFAR; }

    /// "amf", "anmf", "mcfar:<metric>:<stat>", "gamf:<metric>:<stat>"
    std::string name() const;
    static DetectorSpec from_name(const std::string& name);
};

struct DetectionStatistic {
    double value = 0.0;
    DetectorSpec detector;
};

/// AMF statistic |x^H R^{-1} s|^2 / (s^H R^{-1} s).
double amf_stat(const Snapshot& x, const Snapshot& s, const HpdMatrix& rhat);

/// ANMF statistic, normalized by (x^H R^{-1} x)(s^H R^{-1} s); lies in [0,1].
double anmf_stat(const Snapshot& x, const Snapshot& s, const HpdMatrix& rhat);

/// Matrix-CFAR statistic d(R_g, R_CUT) under the requested metric.
double matrix_cfar_stat(const HpdMatrix& rg, const HpdMatrix& rcut, MetricKind kind);

/// AMF with the SCM replaced by a Riemannian geometric mean or median.
double geometric_amf_stat(const Snapshot& x, const Snapshot& s, const HpdMatrix& rg);

/// H1 iff value > gamma (strict exceedance; ties decide H0).
Hypothesis decide(const DetectionStatistic& stat, double gamma);

}  // namespace mcfar
