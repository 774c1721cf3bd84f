"""Adaptive Gauss-Kronrod quadrature for proper and improper integrals.

A 7-15 Gauss-Kronrod pair drives a globally adaptive bisection: the
subinterval with the largest error estimate is split until the combined
estimate meets ``max(abs_tol, rel_tol * |integral|)`` or ``max_depth`` is
exceeded.  All nodes are interior, so integrands are never evaluated at
interval endpoints (removable endpoint singularities are tolerated).

Intervals with ``b = inf`` require an explicit substitution:

* ``rational_map``: x = a + t/(1-t) on t in [0, 1)
* ``log_map``:      x = a + expm1(t/(1-t)) on t in [0, 1)

Both are monotone maps of [0,1) onto [a, inf); the integrand times the
Jacobian must decay at infinity.
"""

from __future__ import annotations

import heapq
import math
import os
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

from .errors import EvaluationError, ToleranceFailure

SUBSTITUTIONS = ("none", "log_map", "rational_map")

# 15-point Kronrod extension of 7-point Gauss (QUADPACK dqk15 constants).
_XGK = (
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.0,
)
_WGK = (
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
)
_WG = (
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
)


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances and strategy knobs for :func:`integrate`."""

    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    max_depth: int = 48
    improper_substitution: str = "none"

    def __post_init__(self):
        if not (self.abs_tol > 0.0 and self.rel_tol > 0.0):
            raise ValueError("quadrature tolerances must be positive")
        if self.max_depth < 1:
            raise ValueError("max_depth must be at least 1")
        if self.improper_substitution not in SUBSTITUTIONS:
            raise ValueError(
                f"unknown substitution {self.improper_substitution!r}; "
                f"choose one of {SUBSTITUTIONS}"
            )


def default_spec(substitution: str = "none") -> QuadratureSpec:
    """Spec with library defaults; ``KAHLERAE_TOL`` overrides both tolerances."""
    tol = os.environ.get("KAHLERAE_TOL")
    if tol is not None:
        t = float(tol)
        return QuadratureSpec(abs_tol=t, rel_tol=t, improper_substitution=substitution)
    return QuadratureSpec(improper_substitution=substitution)


def _gk15(f: Callable[[float], float], a: float, b: float) -> Tuple[float, float]:
    """One Gauss-Kronrod 7-15 panel: returns (value, error_estimate)."""
    h = 0.5 * (b - a)
    c = 0.5 * (a + b)
    fv = []
    for x in _XGK[:-1]:
        fv.append(f(c - h * x))
        fv.append(f(c + h * x))
    fv.append(f(c))
    for v in fv:
        if not math.isfinite(v):
            raise EvaluationError(
                f"integrand returned a non-finite value on [{a!r}, {b!r}]"
            )
    resk = _WGK[-1] * fv[-1]
    resg = _WG[-1] * fv[-1]
    for i, x in enumerate(_XGK[:-1]):
        pair = fv[2 * i] + fv[2 * i + 1]
        resk += _WGK[i] * pair
        if i % 2 == 1:
            resg += _WG[i // 2] * pair
    resk *= h
    resg *= h
    # QUADPACK-style error refinement via the mean-deviation integral.
    mean = resk / (b - a)
    resasc = _WGK[-1] * abs(fv[-1] - mean)
    for i in range(7):
        resasc += _WGK[i] * (abs(fv[2 * i] - mean) + abs(fv[2 * i + 1] - mean))
    resasc *= abs(h)
    err = abs(resk - resg)
    if resasc != 0.0 and err != 0.0:
        err = resasc * min(1.0, (200.0 * err / resasc) ** 1.5)
    err = max(err, 5e-16 * abs(resk))
    return resk, err


def _substituted(f, a: float, sub: str):
    """Transform f on [a, inf) into g on [0, 1) with the chosen map."""
    if sub == "rational_map":

        def g(t: float) -> float:
            w = 1.0 - t
            return f(a + t / w) / (w * w)

    elif sub == "log_map":

        def g(t: float) -> float:
            w = 1.0 - t
            v = t / w
            if v > 700.0:
                # beyond double range; integrable tails contribute nothing here
                return 0.0
            return f(a + math.expm1(v)) * math.exp(v) / (w * w)

    else:
        raise ValueError(
            "integration to +inf requires improper_substitution "
            "'rational_map' or 'log_map'"
        )
    return g


def integrate(
    f: Callable[[float], float],
    a: float,
    b: float,
    spec: Optional[QuadratureSpec] = None,
) -> Tuple[float, float]:
    """Adaptive integral of ``f`` over (a, b); returns (value, error_estimate).

    ``b`` may be ``math.inf`` when the spec selects an improper substitution.
    Raises :class:`ToleranceFailure` when the tolerance cannot be met within
    ``max_depth`` bisections, reporting the worst subinterval.
    """
    if spec is None:
        spec = default_spec()
    if not a < b:
        raise ValueError("integration bounds must satisfy a < b")
    if math.isinf(b):
        g = _substituted(f, a, spec.improper_substitution)
        lo, hi = 0.0, 1.0
    else:
        g, lo, hi = f, float(a), float(b)

    val, err = _gk15(g, lo, hi)
    heap = [(-err, 0, lo, hi, val, err, 0)]
    total, toterr = val, err
    counter = 1
    while True:
        tol = max(spec.abs_tol, spec.rel_tol * abs(total))
        if toterr <= tol or not heap:
            return total, toterr
        neg, _, ia, ib, ival, ierr, depth = heapq.heappop(heap)
        if ierr <= 5e-15 * abs(ival) + 1e-300:
            # round-off-limited panel; splitting cannot improve it
            continue
        if depth >= spec.max_depth:
            raise ToleranceFailure(
                "quadrature tolerance not met within max_depth",
                interval=(ia, ib),
                error_estimate=ierr,
            )
        mid = 0.5 * (ia + ib)
        lval, lerr = _gk15(g, ia, mid)
        rval, rerr = _gk15(g, mid, ib)
        total += lval + rval - ival
        toterr += lerr + rerr - ierr
        heapq.heappush(heap, (-lerr, counter, ia, mid, lval, lerr, depth + 1))
        counter += 1
        heapq.heappush(heap, (-rerr, counter, mid, ib, rval, rerr, depth + 1))
        counter += 1
        if counter > 60000:
            worst = heap[0]
            raise ToleranceFailure(
                "quadrature subdivision budget exhausted",
                interval=(worst[2], worst[3]),
                error_estimate=worst[5],
            )


def integrate_2d(
    f: Callable[[float, float], float],
    x_interval: Tuple[float, float],
    y_interval: Tuple[float, float],
    spec: Optional[QuadratureSpec] = None,
    x_substitution: Optional[str] = None,
    y_substitution: Optional[str] = None,
) -> Tuple[float, float]:
    """Nested adaptive integral over a product of two intervals.

    Per-axis substitutions default to ``spec.improper_substitution``.  The
    inner (y) integral runs at a tenth of the outer tolerances; the returned
    error estimate combines the outer estimate with the sampled inner ones.
    """
    if spec is None:
        spec = default_spec()
    xs = x_substitution if x_substitution is not None else spec.improper_substitution
    ys = y_substitution if y_substitution is not None else spec.improper_substitution
    inner_spec = QuadratureSpec(
        abs_tol=spec.abs_tol * 0.1,
        rel_tol=spec.rel_tol * 0.1,
        max_depth=spec.max_depth,
        improper_substitution=ys,
    )
    outer_spec = QuadratureSpec(
        abs_tol=spec.abs_tol,
        rel_tol=spec.rel_tol,
        max_depth=spec.max_depth,
        improper_substitution=xs,
    )
    ay, by = y_interval
    inner_errs = []

    def outer_integrand(x: float) -> float:
        val, ierr = integrate(lambda y: f(x, y), ay, by, inner_spec)
        inner_errs.append(ierr)
        return val

    val, oerr = integrate(outer_integrand, x_interval[0], x_interval[1], outer_spec)
    ierr_mean = sum(inner_errs) / max(1, len(inner_errs))
    width = x_interval[1] - x_interval[0]
    if math.isinf(width):
        width = 1.0  # substituted variable lives on [0, 1)
    return val, oerr + ierr_mean * abs(width)
