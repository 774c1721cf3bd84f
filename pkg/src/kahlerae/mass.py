"""The three mass computations and the mass-inequality verification.

Routes, all normalized by Gamma(n/2) / (4 (n-1) pi^(n/2)) = 1/(12 pi^2) for
n = 4:

* ``adm_flux_at_radius``: boundary flux of (g_kl,k - g_kk,l) nu_l over the
  Euclidean 3-sphere, reduced by torus invariance to one adaptive integral
  over the quarter circle;
* ``adm_mass``: Richardson-style extrapolation of the flux sequence in
  rho^-(2 tau - 2) with tau from the decay fit;
* ``mass_scalar_integral``: (1/12 pi^2) int R dvol via the radial reduction
  (unit 3-sphere area 2 pi^2), with R the Riemannian scalar of the real
  metric so the two routes agree;
* ``theorem11_rhs``: the lower-bound integral
  (1/12 pi^2) int (|Hess x1|^2 + |Hess x2|^2)/2 + |grad x1|^2 R dvol,
  reduced by torus invariance to a 2D quadrature with measure
  (2 pi)^2 rho1 rho2 d rho1 d rho2.

The first Chern pairing term of the mass formula vanishes identically on
C^2 and is asserted, not computed.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from .curvature import riemannian_scalar, scalar_and_det, scalar_decay_exponent
from .errors import ExactlyFlat, ExtrapolationUnreliable, NotIntegrable
from .profiles import RadialProfile, estimate_decay, real_metric_tensor
from .quadrature import QuadratureSpec, default_spec, integrate, integrate_2d
from .realgeom import coordinate_hessian_norms

# Gamma(n/2) / (4 (n-1) pi^(n/2)) at n = 4.
MASS_CONSTANT = 1.0 / (12.0 * math.pi**2)

RIGIDITY_TOL = 1e-12

DEFAULT_RHO_SEQUENCE = (20.0, 60.0, 200.0)


@dataclass
class MassReport:
    """Bundle of the mass routes and the inequality slack for one metric."""

    family: str
    lam: Optional[float]
    adm_flux: float
    adm_flux_error: float
    adm_flux_sequence: List[Tuple[float, float]]
    mass_scalar_integral: float
    rhs_theorem11: float
    slack: float
    rigidity_flag: bool

    def to_json_dict(self) -> dict:
        return {
            "schema": "1",
            "family": self.family,
            "lambda": self.lam,
            "adm_flux": self.adm_flux,
            "adm_flux_error": self.adm_flux_error,
            "mass_scalar_integral": self.mass_scalar_integral,
            "rhs_theorem11": self.rhs_theorem11,
            "slack": self.slack,
            "rigidity_flag": self.rigidity_flag,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)


def flux_integral(
    metric_derivs: Callable[[np.ndarray], np.ndarray],
    rho: float,
    spec: Optional[QuadratureSpec] = None,
) -> float:
    """Raw flux of (g_kl,k - g_kk,l) nu_l over the Euclidean sphere S_rho.

    ``metric_derivs(p)`` must return dG with dG[c, a, b] = d_c g_ab at p.
    Torus invariance reduces the 3-sphere to theta in (0, pi/2) against the
    measure (2 pi)^2 rho^3 cos(theta) sin(theta) d theta.
    """
    if spec is None:
        spec = QuadratureSpec(abs_tol=1e-12, rel_tol=1e-9, max_depth=30)

    def integrand(theta: float) -> float:
        p = np.array(
            [rho * math.cos(theta), 0.0, rho * math.sin(theta), 0.0]
        )
        dG = metric_derivs(p)
        nu = p / rho
        val = 0.0
        for l in range(4):
            if nu[l] == 0.0:
                continue
            acc = 0.0
            for k in range(4):
                acc += dG[k, k, l] - dG[l, k, k]
            val += acc * nu[l]
        return val * math.cos(theta) * math.sin(theta)

    value, _ = integrate(integrand, 0.0, math.pi / 2.0, spec)
    return value * (2.0 * math.pi) ** 2 * rho**3


def adm_flux_at_radius(
    profile: RadialProfile, rho: float, spec: Optional[QuadratureSpec] = None
) -> float:
    """Mass-normalized flux integral at one Euclidean radius."""

    def derivs(p: np.ndarray) -> np.ndarray:
        return real_metric_tensor(profile, p).dG

    return MASS_CONSTANT * flux_integral(derivs, rho, spec)


def extrapolate_flux(
    rhos: Sequence[float], fluxes: Sequence[float], power: float
) -> Tuple[float, float]:
    """Least-squares limit of flux(rho) = m + c rho^-power.

    Raises :class:`ExtrapolationUnreliable` when the tail is non-monotone
    above round-off noise.
    """
    rhos = [float(r) for r in rhos]
    fluxes = [float(f) for f in fluxes]
    if len(rhos) < 3 or len(rhos) != len(fluxes):
        raise ValueError("need at least three (rho, flux) pairs")
    if sorted(rhos) != rhos:
        raise ValueError("rho sequence must be increasing")
    scale = max(abs(f) for f in fluxes)
    noise = max(1e-14, 1e-11 * scale)
    diffs = [b - a for a, b in zip(fluxes[:-1], fluxes[1:])]
    signs = {1 if d > noise else -1 for d in diffs if abs(d) > noise}
    if len(signs) > 1:
        raise ExtrapolationUnreliable(
            f"flux sequence is non-monotone beyond noise: {fluxes!r}"
        )
    A = np.vstack([np.ones(len(rhos)), np.array(rhos) ** (-power)]).T
    coef, *_ = np.linalg.lstsq(A, np.array(fluxes), rcond=None)
    fit = A @ coef
    residual = float(np.max(np.abs(fit - np.array(fluxes))))
    tail_gap = abs(coef[0] - fluxes[-1])
    err = max(residual, tail_gap * (rhos[-2] / rhos[-1]) ** power)
    return float(coef[0]), err


def adm_mass(
    profile: RadialProfile,
    rho_sequence: Optional[Sequence[float]] = None,
    spec: Optional[QuadratureSpec] = None,
) -> Tuple[float, float]:
    """ADM mass as the extrapolated limit of the flux sequence."""
    if rho_sequence is None:
        rho_sequence = DEFAULT_RHO_SEQUENCE
    fluxes = [adm_flux_at_radius(profile, rho, spec) for rho in rho_sequence]
    try:
        decay = estimate_decay(
            profile, (rho_sequence[0], 100.0 * rho_sequence[-1])
        )
        power = 2.0 * decay.tau - 2.0
    except ExactlyFlat:
        return 0.0, float(max(abs(f) for f in fluxes))
    power = max(power, 0.5)
    return extrapolate_flux(list(rho_sequence), fluxes, power)


def mass_scalar_integral(
    profile: RadialProfile,
    spec: Optional[QuadratureSpec] = None,
    tail_window: Tuple[float, float] = (50.0, 5000.0),
) -> float:
    """(1/12 pi^2) int R dvol by the radial volume reduction.

    R is the Riemannian scalar of the identity-normalized real metric and
    dvol = det_ratio * dvol_eucl; the unit 3-sphere has area 2 pi^2.  The
    scalar-curvature tail must decay faster than r^-4 (integrability), else
    :class:`NotIntegrable`.
    """
    from .curvature import RIEMANNIAN_FACTOR

    if spec is None:
        spec = QuadratureSpec(
            abs_tol=1e-12, rel_tol=1e-9, improper_substitution="rational_map"
        )
    peak = max(
        abs(riemannian_scalar(profile, r))
        for r in np.geomspace(tail_window[0], tail_window[1], 5)
    )
    if peak > 1e-30:
        exponent = scalar_decay_exponent(profile, tail_window)
        if exponent >= -4.0:
            raise NotIntegrable(
                f"scalar curvature tail exponent {exponent:.3f} >= -4"
            )

    def integrand(r: float) -> float:
        scal, det = scalar_and_det(profile, r)
        return RIEMANNIAN_FACTOR * scal * det * r**3

    value, _ = integrate(integrand, 0.0, math.inf, spec)
    return MASS_CONSTANT * 2.0 * math.pi**2 * value


def theorem11_rhs(
    profile: RadialProfile,
    spec: Optional[QuadratureSpec] = None,
    include_curvature_term: bool = True,
) -> float:
    """Lower-bound integral of the mass inequality.

    Torus invariance of (|Hess x1|^2 + |Hess x2|^2)/2 + |grad x1|^2 R reduces
    the 4D integral to the quarter plane in (rho1, rho2) = (|z1|, |z2|) with
    measure (2 pi)^2 rho1 rho2; ``include_curvature_term=False`` gives the
    Hessian-only integral used by the rigidity check.
    """
    if spec is None:
        spec = QuadratureSpec(
            abs_tol=2e-9, rel_tol=1e-6, improper_substitution="rational_map"
        )

    def integrand(rho1: float, rho2: float) -> float:
        p = (rho1, 0.0, rho2, 0.0)
        h1, h2, grad1 = coordinate_hessian_norms(profile, p)
        r = math.hypot(rho1, rho2)
        scal, det = scalar_and_det(profile, r)
        from .curvature import RIEMANNIAN_FACTOR

        val = 0.5 * (h1 + h2)
        if include_curvature_term:
            val += grad1 * RIEMANNIAN_FACTOR * scal
        return val * det * rho1 * rho2

    value, _ = integrate_2d(
        integrand, (0.0, math.inf), (0.0, math.inf), spec
    )
    return MASS_CONSTANT * (2.0 * math.pi) ** 2 * value


def mass_inequality_report(
    profile: RadialProfile,
    family: str = "",
    lam: Optional[float] = None,
    rho_sequence: Optional[Sequence[float]] = None,
    rhs_spec: Optional[QuadratureSpec] = None,
) -> MassReport:
    """Assemble the mass routes, the inequality slack, and the rigidity flag.

    The rigidity case (zero mass forces vanishing coordinate Hessians)
    is flagged when both the mass and the full lower-bound integral sit
    below ``RIGIDITY_TOL``.
    """
    if rho_sequence is None:
        rho_sequence = DEFAULT_RHO_SEQUENCE
    fluxes = [adm_flux_at_radius(profile, rho) for rho in rho_sequence]
    try:
        decay = estimate_decay(profile, (rho_sequence[0], 100.0 * rho_sequence[-1]))
        power = max(2.0 * decay.tau - 2.0, 0.5)
        flux_mass, flux_err = extrapolate_flux(list(rho_sequence), fluxes, power)
    except ExactlyFlat:
        flux_mass, flux_err = 0.0, float(max(abs(f) for f in fluxes))
    msi = mass_scalar_integral(profile)
    rhs = theorem11_rhs(profile, spec=rhs_spec)
    slack = msi - rhs
    rigidity = abs(msi) <= RIGIDITY_TOL and abs(rhs) <= RIGIDITY_TOL
    if rigidity:
        hess_only = theorem11_rhs(
            profile, spec=rhs_spec, include_curvature_term=False
        )
        rigidity = abs(hess_only) <= RIGIDITY_TOL
    return MassReport(
        family=family or profile.label,
        lam=lam if lam is not None else profile.params.get("lambda"),
        adm_flux=flux_mass,
        adm_flux_error=flux_err,
        adm_flux_sequence=list(zip([float(r) for r in rho_sequence], fluxes)),
        mass_scalar_integral=msi,
        rhs_theorem11=rhs,
        slack=slack,
        rigidity_flag=rigidity,
    )
