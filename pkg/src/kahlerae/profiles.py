"""Radial Kahler potentials on C^2 and the metric data they generate.

A :class:`RadialProfile` wraps u(s) = phi'(s) for a potential phi of
s = r**2 as a jet-evaluable function; everything downstream (Hermitian
matrix, real 4x4 tensor with exact first and second partials, decay fits)
is produced from u-jets with no numerical differentiation.

Conventions, fixed once here:

* coordinates (x1, x2, x3, x4) = (Re z1, Im z1, Re z2, Im z2);
* the real metric is normalized so phi(s) = s gives exactly the identity,
  i.e. G = u * I + u' * (x x^T + (Jx)(Jx)^T) for the standard complex
  structure J;
* the Hermitian matrix is h_ab = u delta_ab + u' conj(z_a) z_b, whose
  eigenvalues at z2 = 0 are (u + s u', u).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import ExactlyFlat, GrammarError, NotKaehlerHere
from .expressions import Expr
from .jets import Jet

# Complex structure on R^4 = C^2 in (Re z1, Im z1, Re z2, Im z2) ordering.
J_MATRIX = np.array(
    [
        [0.0, -1.0, 0.0, 0.0],
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, -1.0],
        [0.0, 0.0, 1.0, 0.0],
    ]
)

_EYE4 = np.eye(4)

# d2Q[c, d, a, b] = dd_c dd_d Q_ab is point-independent.
_D2Q = np.zeros((4, 4, 4, 4))
for _c in range(4):
    for _d in range(4):
        _ec = _EYE4[_c]
        _ed = _EYE4[_d]
        _jc = J_MATRIX[:, _c]
        _jd = J_MATRIX[:, _d]
        _D2Q[_c, _d] = (
            np.outer(_ec, _ed)
            + np.outer(_ed, _ec)
            + np.outer(_jc, _jd)
            + np.outer(_jd, _jc)
        )

Point = Union[Sequence[float], Sequence[complex]]


@dataclass
class RadialProfile:
    """A radial Kahler potential, represented through u(s) = phi'(s).

    ``u_fn(s, order)`` must return the order-``order`` jet of u at s.
    Instances are immutable by convention; all operations are pure.
    """

    label: str
    params: Dict[str, float]
    u_fn: Callable[[float, int], Jet]
    potential: Optional[Expr] = None
    density: Optional[object] = None  # VolumeDensity for Monge-Ampere profiles
    m: int = 2

    def u_jet(self, s: float, order: int = 4) -> Jet:
        return self.u_fn(float(s), order)

    def u(self, s: float) -> float:
        return self.u_fn(float(s), 0).value

    @classmethod
    def from_potential(
        cls, label: str, potential: Expr, params: Optional[Dict[str, float]] = None
    ) -> "RadialProfile":
        """Profile backed by a closed-form potential expression phi(s)."""
        params = dict(params or {})

        def u_fn(s: float, order: int) -> Jet:
            phi = potential.eval_jet(Jet.variable(s, order + 1), params)
            return phi.derivative()

        return cls(label=label, params=params, u_fn=u_fn, potential=potential)


@dataclass
class MetricSample:
    """Hermitian metric data at one point of C^2."""

    point: Tuple[float, float, float, float]
    hermitian: np.ndarray  # 2x2 complex
    eigen_base: float  # u(s)
    eigen_fiber: float  # u(s) + s u'(s)
    det_ratio: float  # det relative to Euclidean


@dataclass
class PositivityReport:
    ok: bool
    first_failing_s: Optional[float] = None


@dataclass
class RealMetricData:
    """Real 4x4 tensor with exact first and second partial derivatives."""

    point: np.ndarray  # (4,)
    G: np.ndarray  # (4, 4)
    dG: np.ndarray  # (4, 4, 4): dG[c, a, b] = dd_c G_ab
    d2G: np.ndarray  # (4, 4, 4, 4): d2G[c, d, a, b]


@dataclass
class DecayEstimate:
    """Fitted constants of the uniform decay bound |d^k(g - delta)| <= b r^(-tau-k)."""

    b: float
    tau: float
    residual: float
    tau_grad: float  # from the k = 1 fit
    tau_hess: float  # from the k = 2 fit


def point4(point: Point) -> np.ndarray:
    """Normalize a point given as (z1, z2) or as four reals."""
    p = tuple(point)
    if len(p) == 2:
        z1, z2 = complex(p[0]), complex(p[1])
        return np.array([z1.real, z1.imag, z2.real, z2.imag])
    if len(p) == 4:
        return np.asarray([float(v) for v in p])
    raise ValueError("point must be (z1, z2) or (x1, x2, x3, x4)")


def _check_dimension(profile: RadialProfile):
    if profile.m != 2:
        raise ValueError(
            f"metric assembly is specific to complex dimension 2, "
            f"profile has m={profile.m}"
        )


def metric_matrix(profile: RadialProfile, point: Point) -> MetricSample:
    """Hermitian matrix h_ab = u delta_ab + u' conj(z_a) z_b at the point.

    Raises :class:`NotKaehlerHere` when either eigenvalue is non-positive.
    """
    _check_dimension(profile)
    x = point4(point)
    s = float(x @ x)
    uj = profile.u_jet(s, 1)
    u, up = uj.c[0], uj.c[1]
    fiber = u + s * up
    if u <= 0.0 or fiber <= 0.0:
        raise NotKaehlerHere(
            f"positivity fails at s={s!r}: eigenvalues ({u!r}, {fiber!r})"
        )
    z = np.array([x[0] + 1j * x[1], x[2] + 1j * x[3]])
    herm = u * np.eye(2, dtype=complex) + up * np.outer(np.conj(z), z)
    return MetricSample(
        point=tuple(x),
        hermitian=herm,
        eigen_base=u,
        eigen_fiber=fiber,
        det_ratio=u * fiber,
    )


def default_s_grid(
    s_min: float = 1e-6, s_max: float = 1e6, per_decade: int = 256
) -> np.ndarray:
    """Log-spaced positivity grid, 256 points per decade by default."""
    decades = math.log10(s_max / s_min)
    n = max(2, int(round(decades * per_decade)))
    return np.geomspace(s_min, s_max, n)


def check_positivity(
    profile: RadialProfile, s_grid: Iterable[float]
) -> PositivityReport:
    """Verdict on u > 0 and u + s u' > 0 over the grid."""
    grid = list(s_grid)
    if not grid:
        raise ValueError("positivity grid must be nonempty")
    for s in grid:
        if s <= 0.0:
            raise ValueError("positivity grid must be positive")
        uj = profile.u_jet(float(s), 1)
        u, up = uj.c[0], uj.c[1]
        if u <= 0.0 or u + s * up <= 0.0:
            return PositivityReport(ok=False, first_failing_s=float(s))
    return PositivityReport(ok=True)


def _dQ(x: np.ndarray) -> np.ndarray:
    Jx = J_MATRIX @ x
    out = np.empty((4, 4, 4))
    for c in range(4):
        ec = _EYE4[c]
        jc = J_MATRIX[:, c]
        out[c] = (
            np.outer(ec, x)
            + np.outer(x, ec)
            + np.outer(jc, Jx)
            + np.outer(Jx, jc)
        )
    return out


def real_metric_tensor(profile: RadialProfile, point: Point) -> RealMetricData:
    """Real 4x4 metric G = u I + u' Q with exact first and second partials.

    Q = x x^T + (Jx)(Jx)^T, so all derivatives reduce to jets of u and
    polynomial factors; the Euclidean profile returns the identity with all
    derivatives zero.
    """
    _check_dimension(profile)
    x = point4(point)
    s = float(x @ x)
    uj = profile.u_jet(s, 3)
    u, up, upp, uppp = uj.c[0], uj.c[1], uj.c[2], uj.c[3]
    fiber = u + s * up
    if u <= 0.0 or fiber <= 0.0:
        raise NotKaehlerHere(
            f"positivity fails at s={s!r}: eigenvalues ({u!r}, {fiber!r})"
        )
    Jx = J_MATRIX @ x
    Q = np.outer(x, x) + np.outer(Jx, Jx)
    G = u * _EYE4 + up * Q
    dQ = _dQ(x)
    dG = np.empty((4, 4, 4))
    for c in range(4):
        dG[c] = 2.0 * x[c] * (up * _EYE4 + upp * Q) + up * dQ[c]
    d2G = np.empty((4, 4, 4, 4))
    for c in range(4):
        for d in range(4):
            term = (
                (2.0 * (c == d) * up + 4.0 * x[c] * x[d] * upp) * _EYE4
                + (2.0 * (c == d) * upp + 4.0 * x[c] * x[d] * uppp) * Q
                + 2.0 * x[c] * upp * dQ[d]
                + 2.0 * x[d] * upp * dQ[c]
                + up * _D2Q[c, d]
            )
            d2G[c, d] = term
    return RealMetricData(point=x, G=G, dG=dG, d2G=d2G)


def hermitian_to_real(h: np.ndarray) -> np.ndarray:
    """Real 4x4 form of a 2x2 Hermitian matrix in the fixed normalization.

    G(x_a, x_b) = G(y_a, y_b) = Re h_ab, G(x_a, y_b) = Im h_ab; the identity
    Hermitian matrix maps to the 4x4 identity.  Used as an independent check
    of :func:`real_metric_tensor`.
    """
    G = np.zeros((4, 4))
    for a in range(2):
        for b in range(2):
            re, im = h[a, b].real, h[a, b].imag
            G[2 * a, 2 * b] = re
            G[2 * a + 1, 2 * b + 1] = re
            G[2 * a, 2 * b + 1] = im
            G[2 * a + 1, 2 * b] = -im
    return G


def max_deviation(profile: RadialProfile, r: float, n_theta: int = 17):
    """Sup over the radius-r sphere of |g - delta| and its k=1,2 derivatives.

    U(1)^2 invariance reduces the sphere to the quarter circle
    (r cos t, 0, r sin t, 0).
    """
    dev0 = dev1 = dev2 = 0.0
    for t in np.linspace(0.0, math.pi / 2.0, n_theta):
        p = np.array([r * math.cos(t), 0.0, r * math.sin(t), 0.0])
        data = real_metric_tensor(profile, p)
        dev0 = max(dev0, float(np.max(np.abs(data.G - _EYE4))))
        dev1 = max(dev1, float(np.max(np.abs(data.dG))))
        dev2 = max(dev2, float(np.max(np.abs(data.d2G))))
    return dev0, dev1, dev2


def estimate_decay(
    profile: RadialProfile,
    r_window: Tuple[float, float],
    n_radii: int = 9,
    n_theta: int = 17,
) -> DecayEstimate:
    """Least-squares fit of log sup|d^k(g - delta)| against -(tau + k) log r.

    Raises :class:`ExactlyFlat` when the deviation vanishes identically
    (Euclidean profile).
    """
    r_lo, r_hi = r_window
    if not (0.0 < r_lo < r_hi):
        raise ValueError("r_window must satisfy 0 < r_lo < r_hi")
    radii = np.geomspace(r_lo, r_hi, n_radii)
    devs = np.array([max_deviation(profile, float(r), n_theta) for r in radii])
    if np.max(devs[:, 0]) < 1e-14:
        raise ExactlyFlat("metric deviation below round-off on the window")
    logs_r = np.log(radii)
    taus = []
    intercepts = []
    residual = 0.0
    for k in range(3):
        y = np.log(devs[:, k])
        slope, intercept = np.polyfit(logs_r, y, 1)
        taus.append(-slope - k)
        intercepts.append(intercept)
        fit = slope * logs_r + intercept
        residual = max(residual, float(np.max(np.abs(y - fit))))
    return DecayEstimate(
        b=float(np.exp(intercepts[0])),
        tau=float(taus[0]),
        residual=residual,
        tau_grad=float(taus[1]),
        tau_hess=float(taus[2]),
    )


# -- JSON serialization ------------------------------------------------------


def profile_to_json(profile: RadialProfile) -> dict:
    """JSON description: closed-form potential or generating volume density."""
    out = {"label": profile.label, "params": dict(profile.params)}
    if profile.potential is not None:
        out["potential"] = profile.potential.to_json()
    elif profile.density is not None:
        out["volume_density"] = profile.density.f.to_json()
        out["dimension"] = profile.density.m
    else:
        raise GrammarError(
            "profile has neither a potential expression nor a density"
        )
    return out


def profile_from_json(data: Union[str, dict]) -> RadialProfile:
    """Rebuild a profile from its JSON description.

    Density-backed profiles are reconstructed by re-solving the radial
    Monge-Ampere equation for the serialized density.
    """
    if isinstance(data, str):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise GrammarError(f"invalid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise GrammarError("profile JSON must be an object")
    label = data.get("label", "profile")
    params = {k: float(v) for k, v in (data.get("params") or {}).items()}
    if "potential" in data:
        expr = Expr.from_json(data["potential"])
        return RadialProfile.from_potential(label, expr, params)
    if "volume_density" in data:
        from .mongeampere import VolumeDensity, solve_potential

        expr = Expr.from_json(data["volume_density"])
        density = VolumeDensity(
            f=expr, m=int(data.get("dimension", 2)), params=params, label=label
        )
        return solve_potential(density)
    raise GrammarError("profile JSON needs a 'potential' or 'volume_density'")
