"""Real-coordinate differential geometry: Christoffels, coordinate Hessians,
radial lengths, and an independent Ricci route used to pin conventions.

Coordinate functions x1 = Re z1 and x2 = Im z1 have Hess(x_i) = -Gamma^i,
so their Hessian norms need only the connection.  All metric derivatives are
exact (jet-propagated); no finite differencing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .profiles import Point, RadialProfile, RealMetricData, point4, real_metric_tensor
from .quadrature import QuadratureSpec, default_spec, integrate


@dataclass
class ConnectionSample:
    point: np.ndarray
    christoffels: np.ndarray  # (4, 4, 4): Gamma^k_ij, symmetric in i, j
    inverse_metric: np.ndarray  # (4, 4)


def _christoffels_from(data: RealMetricData) -> ConnectionSample:
    ginv = np.linalg.inv(data.G)
    # Gamma^k_ij = 1/2 g^{kl} (g_{li,j} + g_{lj,i} - g_{ij,l})
    dg = data.dG  # dg[c, a, b] = d_c g_ab
    bracket = (
        np.einsum("jli->lij", dg)
        + np.einsum("ilj->lij", dg)
        - np.einsum("lij->lij", dg)
    )
    gamma = 0.5 * np.einsum("kl,lij->kij", ginv, bracket)
    return ConnectionSample(point=data.point, christoffels=gamma, inverse_metric=ginv)


def christoffels(profile: RadialProfile, point: Point) -> ConnectionSample:
    return _christoffels_from(real_metric_tensor(profile, point))


def metric_compatibility_residual(profile: RadialProfile, point: Point) -> float:
    """Max |nabla_c g_ab|; identically zero for the Levi-Civita connection."""
    data = real_metric_tensor(profile, point)
    conn = _christoffels_from(data)
    gam, G = conn.christoffels, data.G
    nabla = (
        data.dG
        - np.einsum("dca,db->cab", gam, G)
        - np.einsum("dcb,ad->cab", gam, G)
    )
    return float(np.max(np.abs(nabla)))


def coordinate_hessian_norms(
    profile: RadialProfile, point: Point
) -> Tuple[float, float, float]:
    """(|Hess x1|^2, |Hess x2|^2, |grad x1|^2) at the point.

    Hess(x_i)_ab = -Gamma^i_ab for a coordinate function, and
    |grad x1|^2 = g^{11} (inverse-metric entry).
    """
    conn = christoffels(profile, point)
    ginv = conn.inverse_metric
    out = []
    for i in (0, 1):
        gam_i = conn.christoffels[i]
        out.append(float(np.einsum("ac,bd,ab,cd->", ginv, ginv, gam_i, gam_i)))
    return out[0], out[1], float(ginv[0, 0])


def ricci_tensor(profile: RadialProfile, point: Point) -> np.ndarray:
    """Honest Ricci tensor of the real metric from Christoffel derivatives.

    Independent of the complex log-det route; used to validate the
    curvature conventions.  Needs exact second metric derivatives, which
    the jet pipeline provides.
    """
    data = real_metric_tensor(profile, point)
    conn = _christoffels_from(data)
    gam = conn.christoffels
    ginv = conn.inverse_metric
    dg = data.dG
    d2g = data.d2G
    # d Gamma^k_ij / dx_c = 1/2 dginv^{kl}(...) + 1/2 g^{kl} d(...)
    dginv = -np.einsum("ka,cab,bl->ckl", ginv, dg, ginv)
    bracket = (
        np.einsum("jli->lij", dg)
        + np.einsum("ilj->lij", dg)
        - np.einsum("lij->lij", dg)
    )
    dbracket = (
        np.einsum("cjli->clij", d2g)
        + np.einsum("cilj->clij", d2g)
        - np.einsum("clij->clij", d2g)
    )
    dgamma = 0.5 * (
        np.einsum("ckl,lij->ckij", dginv, bracket)
        + np.einsum("kl,clij->ckij", ginv, dbracket)
    )
    # Ric_ij = d_k Gamma^k_ij - d_i Gamma^k_kj + Gamma^k_kl Gamma^l_ij
    #          - Gamma^k_il Gamma^l_kj
    term1 = np.einsum("kkij->ij", dgamma)
    term2 = np.einsum("ikkj->ij", dgamma)
    term3 = np.einsum("kkl,lij->ij", gam, gam)
    term4 = np.einsum("kil,lkj->ij", gam, gam)
    return term1 - term2 + term3 - term4


def riemannian_scalar_at_point(profile: RadialProfile, point: Point) -> float:
    """Scalar curvature g^{ij} Ric_ij via the real-tensor route."""
    data = real_metric_tensor(profile, point)
    ginv = np.linalg.inv(data.G)
    ric = ricci_tensor(profile, point)
    return float(np.einsum("ij,ij->", ginv, ric))


def radial_length(
    profile: RadialProfile,
    r_from: float,
    r_to: float,
    spec: Optional[QuadratureSpec] = None,
) -> float:
    """Length of the z1-axis segment [r_from, r_to]: integral of sqrt(g_11).

    Along the axis g_11 = u(t^2) + t^2 u'(t^2).  By spherical symmetry this
    segment realizes the distance between the endpoints (radial geodesic);
    the toolkit records the symmetry argument rather than solving the
    geodesic equation.
    """
    if not 0.0 <= r_from < r_to:
        raise ValueError("need 0 <= r_from < r_to")
    if spec is None:
        spec = default_spec()

    def speed(t: float) -> float:
        s = t * t
        uj = profile.u_jet(s, 1)
        val = uj.c[0] + s * uj.c[1]
        if val <= 0.0:
            raise ValueError(f"positivity fails along the segment at t={t!r}")
        return math.sqrt(val)

    value, _ = integrate(speed, r_from, r_to, spec)
    return value
