"""Radial complex Monge-Ampere generator: from a volume density f(s) to a
radial profile whose metric has volume form f * dvol_eucl.

The determinant condition u^(m-1) (u + s u') = f integrates to

    (s u)^m = beta0 + integral_0^s m t^(m-1) f(t) dt,

so u = (f + (beta0 + W)/s^m)^(1/m) with W(s) = -integral_0^s t^m f'(t) dt
(integration by parts).  Writing the radicand as f + W/s^m avoids the
catastrophic cancellation that the raw integral suffers near s = 0: W is
O(s^(m+1)), its quadrature value carries relative accuracy, and every jet
derivative of W is the closed form -s^m f'(s) and its s-derivatives, so no
quadrature result is ever differentiated.

Near the origin W/s^m is evaluated from its Taylor expansion in the density
jets at 0; the checkpoint table for W is built once at solve time and reads
are pure.
"""

from __future__ import annotations

import bisect
import functools
import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, Optional, Union

import numpy as np

from .errors import InvalidDensity
from .expressions import Expr
from .jets import Jet
from .profiles import RadialProfile
from .quadrature import QuadratureSpec, default_spec, integrate


@dataclass
class VolumeDensity:
    """Positive radial volume density f(s), s = r**2, with f -> 1 at infinity.

    ``m`` is the complex dimension (metric assembly elsewhere requires 2;
    the solver itself is dimension-generic).  The constants r0, t0, beta0
    default to zero; a nonzero beta0 restricts evaluation to s > 0.
    ``scale`` sets the crossover below which the origin series is used;
    it defaults to the smallest positive parameter (or 1).
    """

    f: Union[Expr, object]
    m: int = 2
    params: Dict[str, float] = field(default_factory=dict)
    beta0: float = 0.0
    r0: float = 0.0
    t0: float = 0.0
    label: str = "density"
    scale: Optional[float] = None

    def __post_init__(self):
        if self.m < 2:
            raise ValueError("complex dimension m must be at least 2")
        if self.scale is None:
            positive = [v for v in self.params.values() if v > 0.0]
            self.scale = min(positive) if positive else 1.0

    def f_jet(self, s: float, order: int = 4) -> Jet:
        var = Jet.variable(s, order)
        if hasattr(self.f, "eval_jet"):
            return self.f.eval_jet(var, self.params)
        return self.f(var)


def _w_jet_tail(density: VolumeDensity, s: float, w_value: float, order: int) -> Jet:
    """Jet of W at s > 0 given its quadrature value: W' = -s^m f'(s)."""
    m = density.m
    fj = density.f_jet(s, order)  # f, f', ..., f^(order)
    sj = Jet.variable(s, order - 1) if order >= 1 else None
    coeffs = [w_value]
    if order >= 1:
        # derivatives of -s^m f'(s) via jet arithmetic one order down
        g = (Jet.variable(s, order - 1) ** m) * Jet(fj.c[1:])
        coeffs.extend(-g.c[k] for k in range(order))
    return Jet(coeffs)


class _PotentialSolver:
    """Immutable checkpoint table for W plus pure jet evaluation of u."""

    def __init__(self, density: VolumeDensity, spec: QuadratureSpec):
        self.density = density
        self.spec = spec
        self.m = density.m
        sc = density.scale
        self.series_cut = 1e-3 * sc
        # anchors: 0 and a log ladder; W accumulated once, reads are pure
        ladder = list(np.geomspace(self.series_cut, 1e7 * sc, 81))
        self.anchors = [0.0] + ladder
        self.w_anchor = [0.0]
        for lo, hi in zip(self.anchors[:-1], self.anchors[1:]):
            self.w_anchor.append(self.w_anchor[-1] + self._w_piece(lo, hi))

    def _integrand(self, t: float) -> float:
        fj = self.density.f_jet(t, 1)
        return -(t**self.m) * fj.c[1]

    def _w_piece(self, lo: float, hi: float) -> float:
        # W only matters relative to the radicand f * s^m, so the absolute
        # target may grow like lo^m; this also rides out the float noise of
        # the integrand at large t (f' is a cancellation there).
        abs_tol = max(self.spec.abs_tol, self.spec.rel_tol * max(lo, self.series_cut) ** self.m)
        piece_spec = QuadratureSpec(
            abs_tol=abs_tol,
            rel_tol=self.spec.rel_tol,
            max_depth=self.spec.max_depth,
        )
        try:
            val, _ = integrate(self._integrand, lo, hi, piece_spec)
        except Exception:
            loose = QuadratureSpec(
                abs_tol=100.0 * abs_tol,
                rel_tol=100.0 * self.spec.rel_tol,
                max_depth=self.spec.max_depth,
            )
            val, _ = integrate(self._integrand, lo, hi, loose)
        return val

    def _w_value(self, s: float) -> float:
        i = bisect.bisect_right(self.anchors, s) - 1
        base_s = self.anchors[i]
        base_w = self.w_anchor[i]
        if s == base_s:
            return base_w
        return base_w + self._w_piece(base_s, s)

    def _ratio_series_jet(self, s: float, order: int) -> Jet:
        """Jet of W/s^m near 0 from the density jets at the origin.

        W/s^m = -sum_k f^(k)(0)/k! * s^(k+1) * m-shifted weights; truncation
        error is O(s^(order+1) f^(order+1)), negligible below series_cut.
        """
        m = self.m
        f0 = self.density.f_jet(0.0, 4)
        # W = -int t^m f'(t) dt = -sum_{k>=1} f^(k)(0)/(k-1)! * s^(m+k)/(m+k)
        # W/s^m = -sum_{k>=1} c_k s^k,  c_k = f^(k)(0)/((k-1)! (m+k))
        poly = [0.0]
        for k in range(1, 5):
            poly.append(-f0.c[k] / (math.factorial(k - 1) * (m + k)))
        # derivatives of the polynomial sum c_k s^k at s
        coeffs = []
        for d in range(order + 1):
            acc = 0.0
            for k in range(d, 5):
                acc += poly[k] * math.perm(k, d) * s ** (k - d)
            coeffs.append(acc)
        return Jet(coeffs)

    def u_jet(self, s: float, order: int) -> Jet:
        density = self.density
        fj = density.f_jet(s, order)
        if s < self.series_cut:
            if density.beta0 != 0.0 and s == 0.0:
                raise InvalidDensity(
                    "nonzero beta0 makes the potential singular at s = 0"
                )
            ratio = self._ratio_series_jet(s, order)
            if density.beta0 != 0.0:
                ratio = ratio + density.beta0 / (Jet.variable(s, order) ** self.m)
        else:
            w = _w_jet_tail(density, s, self._w_value(s), order)
            ratio = (w + density.beta0) / (Jet.variable(s, order) ** self.m)
        radicand = fj + ratio
        if radicand.c[0] <= 0.0:
            raise InvalidDensity(
                f"non-positive radicand {radicand.c[0]!r} at s={s!r}"
            )
        return radicand.pow(1.0 / self.m)


def solve_potential(
    density: VolumeDensity, spec: Optional[QuadratureSpec] = None
) -> RadialProfile:
    """Profile with u = ((beta0 + int_0^s m t^(m-1) f dt)^(1/m)) / s.

    The m-th-root form is forced by the determinant condition and reproduces
    the closed-form solution for the rational family of densities.
    """
    if spec is None:
        spec = QuadratureSpec(abs_tol=1e-13, rel_tol=1e-12)
    solver = _PotentialSolver(density, spec)
    params = dict(density.params)
    params.setdefault("m", float(density.m))
    # evaluations are pure; caching makes repeated-radius sweeps cheap
    u_fn = functools.lru_cache(maxsize=200_000)(solver.u_jet)
    return RadialProfile(
        label=f"ma-solution({density.label})",
        params=params,
        u_fn=lambda s, order: u_fn(float(s), int(order)),
        potential=None,
        density=density,
        m=density.m,
    )


def verify_volume(
    profile: RadialProfile, density: VolumeDensity, s_grid: Iterable[float]
) -> float:
    """Max over the grid of |u^(m-1) (u + s u') - f| (volume-form residual)."""
    m = density.m
    worst = 0.0
    for s in s_grid:
        s = float(s)
        uj = profile.u_jet(s, 1)
        u, up = uj.c[0], uj.c[1]
        det = u ** (m - 1) * (u + s * up)
        f = density.f_jet(s, 0).c[0]
        worst = max(worst, abs(det - f))
    return worst


def determinant_identity_residual(
    profile: RadialProfile, density: VolumeDensity, s_grid: Iterable[float]
) -> float:
    """Max |d/ds (s u)^m - m s^(m-1) f| over interior grid points."""
    m = density.m
    worst = 0.0
    for s in s_grid:
        s = float(s)
        if s <= 0.0:
            continue
        uj = profile.u_jet(s, 1)
        su = Jet.variable(s, 1) * uj
        lhs = m * su.c[0] ** (m - 1) * su.c[1]
        rhs = m * s ** (m - 1) * density.f_jet(s, 0).c[0]
        worst = max(worst, abs(lhs - rhs))
    return worst
