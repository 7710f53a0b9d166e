#pragma once

#include <string>

#include "mcfar/hermitian.hpp"
#include "mcfar/types.hpp"

namespace mcfar {

/// The Riemannian geometries available on the HPD cone, plus the flat
/// Euclidean geometry of the ambient Hermitian space.
enum class MetricKind { AIRM, LE, BW, Euclidean };

const char* metric_name(MetricKind kind);
MetricKind metric_from_name(const std::string& name);

/// Geodesic distance between two HPD matrices.
double distance(MetricKind kind, const HpdMatrix& p1, const HpdMatrix& p2);

/// Point at parameter t in [0,1] on the geodesic from p1 to p2.
/// t outside [0,1] throws InvalidInput (BW geodesics may exit the cone).
HpdMatrix geodesic(MetricKind kind, const HpdMatrix& p1, const HpdMatrix& p2, double t);

/// Riemannian exponential at p applied to tangent vector v.
/// For BW, throws DomainError (with the offending eigenvalue) when
/// I + L_p[v] is not positive definite.
HpdMatrix exp_map(MetricKind kind, const HpdMatrix& p, const HermitianMatrix& v);

/// Riemannian logarithm: tangent vector at p1 pointing to p2.
HermitianMatrix log_map(MetricKind kind, const HpdMatrix& p1, const HpdMatrix& p2);

/// Riemannian gradient at r of the map r -> d^2(pref, r).
/// Equals -2 log_map(r, pref) in every geometry handled here.
HermitianMatrix grad_sq_dist(MetricKind kind, const HpdMatrix& pref, const HpdMatrix& r);

/// Riemannian gradient at r of r -> d(pref, r); undefined at r = pref
/// (throws DomainError when the distance underflows).
HermitianMatrix grad_dist(MetricKind kind, const HpdMatrix& pref, const HpdMatrix& r);

/// Riemannian inner product of tangent vectors a, b at base point p.
double metric_inner(MetricKind kind, const HpdMatrix& p, const HermitianMatrix& a,
                    const HermitianMatrix& b);

double metric_norm(MetricKind kind, const HpdMatrix& p, const HermitianMatrix& a);

/// Directional derivative of the matrix logarithm at HPD p along v
/// (divided differences in the eigenbasis of p).
HermitianMatrix dlog(const HpdMatrix& p, const HermitianMatrix& v);

/// Directional derivative of the matrix exponential at Hermitian x along v.
HermitianMatrix dexp(const HermitianMatrix& x, const HermitianMatrix& v);

namespace detail {

double distance_raw(MetricKind kind, const CMatrix& p1, const CMatrix& p2);
CMatrix exp_map_raw(MetricKind kind, const CMatrix& p, const CMatrix& v);
CMatrix log_map_raw(MetricKind kind, const CMatrix& p1, const CMatrix& p2);
double metric_inner_raw(MetricKind kind, const CMatrix& p, const CMatrix& a, const CMatrix& b);

/// Divided-difference transform: U (V~ o Phi) U^H where Phi_ij is the
/// Loewner matrix of f over the eigenvalues of the base point.
CMatrix dlog_raw(const CMatrix& p, const CMatrix& v);
CMatrix dexp_raw(const CMatrix& x, const CMatrix& v);

}  // namespace detail

}  // namespace mcfar
