#include "mcfar/detectors.hpp"

#include <cmath>

#include <Eigen/Cholesky>

namespace mcfar {

DetectorSpec DetectorSpec::amf() { return DetectorSpec{Family::AMF}; }

DetectorSpec DetectorSpec::anmf() { return DetectorSpec{Family::ANMF}; }

DetectorSpec DetectorSpec::matrix_cfar(MetricKind metric, Statistic statistic) {
    return DetectorSpec{Family::MatrixCFAR, metric, statistic};
}

DetectorSpec DetectorSpec::geometric_amf(MetricKind metric, Statistic statistic) {
    return DetectorSpec{Family::GeometricAMF, metric, statistic};
}

std::string DetectorSpec::name() const {
    switch (family) {
        case Family::AMF: return "amf";
        case Family::ANMF: return "anmf";
        case Family::MatrixCFAR:
            return std::string("mcfar:") + metric_name(metric) + ":" + statistic_name(statistic);
        case Family::GeometricAMF:
            return std::string("gamf:") + metric_name(metric) + ":" + statistic_name(statistic);
    }
    return "?";
}

DetectorSpec DetectorSpec::from_name(const std::string& name) {
    if (name == "amf") return amf();
    if (name == "anmf") return anmf();
    const auto c1 = name.find(':');
    const auto c2 = name.find(':', c1 + 1);
    if (c1 != std::string::npos && c2 != std::string::npos) {
        const std::string fam = name.substr(0, c1);
        const MetricKind metric = metric_from_name(name.substr(c1 + 1, c2 - c1 - 1));
        const Statistic stat = statistic_from_name(name.substr(c2 + 1));
        if (fam == "mcfar") return matrix_cfar(metric, stat);
        if (fam == "gamf") return geometric_amf(metric, stat);
    }
    throw InvalidInput("unknown detector '" + name + "'");
}

namespace {

struct WhitenedForms {
    Complex xs;   // x^H R^{-1} s
    double ss;    // s^H R^{-1} s
    double xx;    // x^H R^{-1} x
};

WhitenedForms whiten(const Snapshot& x, const Snapshot& s, const HpdMatrix& rhat,
                     const char* where) {
    if (x.size() != rhat.dim() || s.size() != rhat.dim())
        throw InvalidInput(std::string(where) + ": dimension mismatch");
    detail::require_finite(x, where);
    detail::require_finite(s, where);
    Eigen::LLT<CMatrix> llt(rhat.mat());
    if (llt.info() != Eigen::Success) throw DomainError(std::string(where) + ": R not HPD");
    const CVector ris = llt.solve(s);
    WhitenedForms f;
    f.xs = x.dot(ris);
    f.ss = s.dot(ris).real();
    f.xx = x.dot(llt.solve(x)).real();
    return f;
}

}  // namespace

double amf_stat(const Snapshot& x, const Snapshot& s, const HpdMatrix& rhat) {
    const auto f = whiten(x, s, rhat, "amf_stat");
    if (f.ss <= 0.0) throw InvalidInput("amf_stat: degenerate steering vector");
    return std::norm(f.xs) / f.ss;
}

double anmf_stat(const Snapshot& x, const Snapshot& s, const HpdMatrix& rhat) {
    if (x.norm() == 0.0) throw InvalidInput("anmf_stat: x must be nonzero");
    const auto f = whiten(x, s, rhat, "anmf_stat");
    if (f.ss <= 0.0) throw InvalidInput("anmf_stat: degenerate steering vector");
    return std::min(std::norm(f.xs) / (f.xx * f.ss), 1.0);
}

double matrix_cfar_stat(const HpdMatrix& rg, const HpdMatrix& rcut, MetricKind kind) {
    return distance(kind, rg, rcut);
}

double geometric_amf_stat(const Snapshot& x, const Snapshot& s, const HpdMatrix& rg) {
    return amf_stat(x, s, rg);
}

Hypothesis decide(const DetectionStatistic& stat, double gamma) {
    return stat.value > gamma ? Hypothesis::H1 : Hypothesis::H0;
}

}  // namespace mcfar
