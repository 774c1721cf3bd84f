"""Truncated Taylor (jet) arithmetic.

A ``Jet`` stores the value and derivatives of a scalar function of one real
variable at a point, and propagates them exactly (up to round-off) through
arithmetic and the elementary functions.  Order 4 is the default because the
radial scalar curvature consumes four derivatives of the potential; some
internal paths lift at order 5 so that a derivative can be taken once without
losing accuracy at order 4.

No finite differencing happens anywhere: all derivatives flow through the
Leibniz and composition rules below.
"""

from __future__ import annotations

import math
from typing import Callable, Sequence, Union

from .errors import EvaluationError

ORDER = 4

_BINOM = [[math.comb(n, k) for k in range(n + 1)] for n in range(16)]


class Jet:
    """Value plus derivatives 0..order of a scalar function at a point.

    Coefficients are stored as derivatives (not Taylor coefficients):
    ``jet.c[k]`` is the k-th derivative.
    """

    __slots__ = ("c",)

    def __init__(self, coeffs: Sequence[float]):
        self.c = tuple(float(x) for x in coeffs)

    @property
    def order(self) -> int:
        return len(self.c) - 1

    @property
    def value(self) -> float:
        return self.c[0]

    @classmethod
    def constant(cls, value: float, order: int = ORDER) -> "Jet":
        return cls((float(value),) + (0.0,) * order)

    @classmethod
    def variable(cls, x: float, order: int = ORDER) -> "Jet":
        if order == 0:
            return cls((float(x),))
        return cls((float(x), 1.0) + (0.0,) * (order - 1))

    def derivative(self) -> "Jet":
        """Shift down one order: the jet of f' at the same point."""
        if self.order == 0:
            raise EvaluationError("cannot take derivative of an order-0 jet")
        return Jet(self.c[1:])

    def truncate(self, order: int) -> "Jet":
        if order > self.order:
            raise EvaluationError("cannot extend a jet to higher order")
        return Jet(self.c[: order + 1])

    # -- arithmetic -----------------------------------------------------

    def _coerce(self, other) -> "Jet":
        if isinstance(other, Jet):
            if other.order != self.order:
                raise EvaluationError(
                    f"jet order mismatch: {self.order} vs {other.order}"
                )
            return other
        return Jet.constant(float(other), self.order)

    def __add__(self, other):
        o = self._coerce(other)
        return Jet(tuple(a + b for a, b in zip(self.c, o.c)))

    __radd__ = __add__

    def __neg__(self):
        return Jet(tuple(-a for a in self.c))

    def __sub__(self, other):
        o = self._coerce(other)
        return Jet(tuple(a - b for a, b in zip(self.c, o.c)))

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        o = self._coerce(other)
        n = self.order
        out = []
        for k in range(n + 1):
            bk = _BINOM[k]
            out.append(
                math.fsum(bk[j] * self.c[j] * o.c[k - j] for j in range(k + 1))
            )
        return Jet(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o.c[0] == 0.0:
            raise EvaluationError("division by a jet with zero value")
        n = self.order
        h = [0.0] * (n + 1)
        for k in range(n + 1):
            bk = _BINOM[k]
            acc = self.c[k]
            for j in range(k):
                acc -= bk[j] * h[j] * o.c[k - j]
            h[k] = acc / o.c[0]
        return Jet(h)

    def __rtruediv__(self, other):
        return Jet.constant(float(other), self.order).__truediv__(self)

    def __pow__(self, p):
        if isinstance(p, Jet):
            # general jet exponent routed through exp/log
            return (p * self.log()).exp()
        if float(p) == int(p) and abs(int(p)) <= 64:
            return self._int_pow(int(p))
        return self.pow(float(p))

    def _int_pow(self, n: int) -> "Jet":
        if n == 0:
            return Jet.constant(1.0, self.order)
        if n < 0:
            return Jet.constant(1.0, self.order) / self._int_pow(-n)
        out = self
        for _ in range(n - 1):
            out = out * self
        return out

    # -- composition with elementary functions --------------------------

    def compose(self, outer_derivs: Sequence[float]) -> "Jet":
        """Jet of ``f(self)`` given derivatives of f at ``self.value``.

        ``outer_derivs[k]`` must be the k-th derivative of f evaluated at
        ``self.value``; the list length fixes the usable order.
        """
        n = self.order
        if len(outer_derivs) < n + 1:
            raise EvaluationError("not enough outer derivatives for composition")
        fact = [math.factorial(k) for k in range(n + 1)]
        # Taylor coefficients of inner (with constant term dropped) and outer.
        a = [self.c[k] / fact[k] for k in range(n + 1)]
        a[0] = 0.0
        b = [outer_derivs[k] / fact[k] for k in range(n + 1)]
        res = [0.0] * (n + 1)
        res[0] = b[n]
        for k in range(n - 1, -1, -1):
            # res <- res * a + b[k]  (truncated series product)
            new = [0.0] * (n + 1)
            for i in range(n + 1):
                if res[i] == 0.0:
                    continue
                for j in range(1, n + 1 - i):
                    new[i + j] += res[i] * a[j]
            new[0] += b[k]
            res = new
        return Jet(tuple(res[k] * fact[k] for k in range(n + 1)))

    def sqrt(self) -> "Jet":
        if self.c[0] <= 0.0:
            raise EvaluationError(f"sqrt of non-positive jet value {self.c[0]!r}")
        return self.pow(0.5)

    def log(self) -> "Jet":
        x0 = self.c[0]
        if x0 <= 0.0:
            raise EvaluationError(f"log of non-positive jet value {x0!r}")
        n = self.order
        derivs = [math.log(x0)]
        for k in range(1, n + 1):
            derivs.append((-1.0) ** (k - 1) * math.factorial(k - 1) / x0**k)
        return self.compose(derivs)

    def exp(self) -> "Jet":
        e = math.exp(self.c[0])
        return self.compose([e] * (self.order + 1))

    def pow(self, p: float) -> "Jet":
        x0 = self.c[0]
        if x0 <= 0.0:
            raise EvaluationError(
                f"non-integer power of non-positive jet value {x0!r}"
            )
        n = self.order
        derivs = []
        coeff = 1.0
        for k in range(n + 1):
            derivs.append(coeff * x0 ** (p - k))
            coeff *= p - k
        return self.compose(derivs)

    def __repr__(self):
        return f"Jet{self.c!r}"


JetLike = Union[Jet, float, int]


def jet_lift(f: Callable[[Jet], Jet], x: float, order: int = ORDER) -> Jet:
    """Value and exact derivatives 0..order of ``f`` at ``x``.

    ``f`` is either a callable acting on jets or an expression object with an
    ``eval_jet`` method (see :mod:`kahlerae.expressions`).
    """
    var = Jet.variable(x, order)
    if hasattr(f, "eval_jet"):
        out = f.eval_jet(var)
    else:
        out = f(var)
    if isinstance(out, Jet):
        return out
    return Jet.constant(float(out), order)
