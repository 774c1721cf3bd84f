"""Exception types shared across the toolkit."""

from __future__ import annotations


class KahlerAEError(Exception):
    """Base class for all toolkit errors."""


class EvaluationError(KahlerAEError):
    """Domain violation while evaluating an expression or jet operation.

    Carries a description of the offending operation and, when raised from
    the expression evaluator, the sub-expression that failed.
    """

    def __init__(self, message: str, node=None):
        self.node = node
        if node is not None:
            message = f"{message} in sub-expression {node!r}"
        super().__init__(message)


class GrammarError(KahlerAEError):
    """Malformed expression tree (unknown node, wrong arity, bad JSON)."""


class ToleranceFailure(KahlerAEError):
    """Adaptive quadrature could not meet the requested tolerance.

    Attributes give the worst remaining subinterval in the integration
    variable actually used (after any improper-interval substitution).
    """

    def __init__(self, message: str, interval=None, error_estimate=None):
        self.interval = interval
        self.error_estimate = error_estimate
        if interval is not None:
            message = (
                f"{message}; worst subinterval {interval} with error "
                f"estimate {error_estimate:.3e}"
            )
        super().__init__(message)


class NotKaehlerHere(KahlerAEError):
    """Metric positivity fails at the requested point or radius."""


class ExactlyFlat(KahlerAEError):
    """Decay fit is degenerate because the metric is exactly Euclidean."""


class NotIntegrable(KahlerAEError):
    """Scalar curvature tail decays too slowly for a finite mass integral."""


class ExtrapolationUnreliable(KahlerAEError):
    """Flux sequence has a non-monotone tail; radius extrapolation refused."""


class InvalidDensity(KahlerAEError):
    """Volume density leads to a non-positive radicand in the potential."""


class UnsupportedPair(KahlerAEError):
    """No printed closed form exists for this (family, quantity) pair."""
