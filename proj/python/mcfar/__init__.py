"""Riemannian geometry on HPD matrix manifolds and matrix-CFAR detection.

Thin wrapper over the C++ core. Matrices are numpy complex128 arrays; metric
kinds are the strings "airm", "le", "bw", "euclidean".
"""

from ._core import (  # noqa: F401
    InvalidInput,
    DomainError,
    NumericalFailure,
    amf_stat,
    anmf_stat,
    arithmetic_mean,
    autocorr_estimate,
    bench_bw_solvers,
    bw_mean_fixed_a,
    bw_mean_fixed_b,
    bw_mean_rgd,
    distance,
    exp_map,
    geodesic,
    geometric_amf_stat,
    geometric_midpoint,
    grad_sq_dist,
    hermitian_basis,
    le_mean,
    log_map,
    lyapunov_solve,
    matrix_cfar_stat,
    matrix_exp,
    matrix_inv,
    matrix_log,
    matrix_pow,
    matrix_sqrt,
    metric_inner,
    sample_clutter,
    scm,
    sigma_matrix,
    solve_average,
    steering_ideal,
    toeplitz_cov,
    __version__,
)

METRICS = ("airm", "le", "bw", "euclidean")
