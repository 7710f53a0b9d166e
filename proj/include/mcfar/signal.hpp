#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mcfar/rng.hpp"
#include "mcfar/types.hpp"

namespace mcfar {

/// Compound-Gaussian clutter description. texture_on = false gives the
/// Gaussian clutter benchmark (texture identically 1).
struct ClutterParams {
    int N = 8;                 // pulses per snapshot
    double cnr_db = 20.0;      // clutter-to-noise ratio sigma_c^2 in dB
    double rho = 0.9;          // one-lag coefficient in (0,1)
    double fc = 0.2;           // normalized clutter Doppler in [0,1)
    double shape_alpha = 4.0;  // gamma texture shape
    double scale_beta = 3.0;   // gamma texture scale
    bool texture_on = true;
};

struct SteeringSpec {
    enum class Mode { Ideal, Mismatched };
    Mode mode = Mode::Ideal;
    int N = 8;
    double fd = 0.2;                     // ideal: normalized target Doppler
    double theta_mis_deg = 0.0;          // mismatched: cone angle in degrees
    std::uint64_t orthogonal_draw_seed = 0;  // mismatched: seed of the y draw

    static SteeringSpec ideal(int n, double fd);
    static SteeringSpec mismatched(int n, double theta_deg, std::uint64_t draw_seed);
};

/// One complex data snapshot (N pulses).
using Snapshot = CVector;

struct InterferenceSpec {
    double fi = 0.2;      // normalized interference Doppler
    double inr_db = 10.0; // interference-to-noise ratio
    int count = 2;        // number of contaminated secondary snapshots
};

enum class Hypothesis { H0, H1 };

/// Ideal steering vector (1/sqrt(N)) (1, e^{i 2 pi fd}, ..., e^{i 2 pi fd (N-1)}).
Snapshot steering_ideal(int n, double fd);

/// Mismatched steering vector at cone angle theta to e_1:
///   (1/sqrt(N)) e^{i 2 pi} (e_1 cos(theta) + (y/||y||) sin(theta)),
/// y ~ CN(0, I) projected orthogonal to e_1.
Snapshot steering_mismatched(int n, double theta_mis_deg, RngStream& rng);

/// Realizes a SteeringSpec (the mismatched draw is fixed by its own seed).
Snapshot steering_realize(const SteeringSpec& spec);

void validate(const ClutterParams& params);

/// Speckle covariance Sigma = Sigma_0 + I with
/// Sigma_0(i,j) = sigma_c^2 rho^{|i-j|} e^{i 2 pi fc (i-j)}.
HpdMatrix sigma_matrix(const ClutterParams& params);

/// Second moment E[c c^H] of the clutter: alpha*beta*Sigma with texture,
/// Sigma without.
HpdMatrix clutter_second_moment(const ClutterParams& params);

/// Reference matrix for the SCR and INR amplitude scaling: isotropic at the
/// clutter power scale, tr(Sigma)/N (times the texture second moment
/// E[tau^2] = alpha beta^2 (alpha+1) when the texture is on). Keeping the
/// reference isotropic means the injected amplitude carries no Doppler
/// compensation, so the clutter notch stays visible across an fd sweep.
HpdMatrix scr_reference(const ClutterParams& params);

/// Caches Sigma^{1/2} so per-trial draws avoid repeated eigendecompositions.
class ClutterSampler {
public:
    explicit ClutterSampler(const ClutterParams& params);
    Snapshot sample(RngStream& rng) const;
    const ClutterParams& params() const { return params_; }
    const HpdMatrix& sigma() const { return sigma_; }

private:
    ClutterParams params_;
    HpdMatrix sigma_;
    CMatrix sqrt_sigma_;
};

/// c = sqrt(tau) * Sigma^{1/2} w with w standard circular complex normal and
/// tau ~ Gamma(alpha, beta) (tau = 1 when texture is off).
Snapshot sample_clutter(const ClutterParams& params, RngStream& rng);

/// |a| = sqrt(10^{scr_db/10} / (s^H R^{-1} s)).
double amplitude_from_scr(double scr_db, const Snapshot& s, const HpdMatrix& r);

/// H0: clutter only. H1: a s + clutter, amplitude from the SCR against
/// clutter_second_moment(params), phase zero.
Snapshot make_observation(Hypothesis hyp, const ClutterParams& params, const Snapshot& s,
                          double scr_db, RngStream& rng);
Snapshot make_observation(Hypothesis hyp, const ClutterSampler& sampler, const Snapshot& s,
                          double scr_db, RngStream& rng);

/// m clutter snapshots; the first `count` receive an added interference
/// component b * steering_ideal(N, fi) with b set from inr_db.
std::vector<Snapshot> make_secondary_set(int m, const ClutterParams& params,
                                         const std::optional<InterferenceSpec>& interference,
                                         RngStream& rng);
std::vector<Snapshot> make_secondary_set(int m, const ClutterSampler& sampler,
                                         const std::optional<InterferenceSpec>& interference,
                                         RngStream& rng);

/// Biased lag estimates r_k = (1/N) sum_{l=0}^{N-k-1} x_l conj(x_{l+k}).
CVector autocorr_estimate(const Snapshot& x);

/// Hermitian Toeplitz matrix with (i,j) entry r_{i-j} below the diagonal,
/// conjugates above; diagonally loaded to guarantee strict positivity.
HpdMatrix toeplitz_cov(const Snapshot& x);

/// Sample covariance (1/m) sum x_i x_i^H, diagonally loaded when needed.
HpdMatrix scm(const std::vector<Snapshot>& snapshots);

}  // namespace mcfar
