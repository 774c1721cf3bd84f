"""Closed-form radial expressions with a JSON wire format.

The grammar covers scalar functions of ``s = r**2``:

* ``{"var": "s"}``                       the radial variable
* ``{"const": 2.5}``                     a literal
* ``{"param": "lambda"}``                a named parameter, resolved at eval
* ``{"op": OP, "args": [...]}``          with OP in
  ``add, sub, neg, mul, div, pow, sqrt, log, exp``

``pow`` exponents must be ``const`` or ``param`` nodes (constant exponents;
jet-valued exponents are not part of the grammar).  Expressions evaluate on
plain floats or on :class:`~kahlerae.jets.Jet` values; domain violations
raise :class:`~kahlerae.errors.EvaluationError` naming the failing node.
"""

from __future__ import annotations

import json
from typing import Dict, Iterable, List, Union

from .errors import EvaluationError, GrammarError
from .jets import Jet

_UNARY = ("neg", "sqrt", "log", "exp")
_BINARY = ("add", "sub", "mul", "div", "pow")


class Expr:
    """A validated expression tree node."""

    __slots__ = ("kind", "value", "args")

    def __init__(self, kind: str, value=None, args=()):
        self.kind = kind
        self.value = value
        self.args = tuple(args)

    # -- construction ----------------------------------------------------

    @staticmethod
    def from_json(data) -> "Expr":
        """Parse a JSON-compatible dict (or JSON string) into an Expr."""
        if isinstance(data, str):
            try:
                data = json.loads(data)
            except json.JSONDecodeError as exc:
                raise GrammarError(f"invalid JSON: {exc}") from exc
        return _parse(data)

    def to_json(self) -> dict:
        if self.kind == "var":
            return {"var": "s"}
        if self.kind == "const":
            return {"const": self.value}
        if self.kind == "param":
            return {"param": self.value}
        return {"op": self.kind, "args": [a.to_json() for a in self.args]}

    # -- evaluation --------------------------------------------------------

    def eval(self, s: Union[float, Jet], params: Dict[str, float] = None):
        """Evaluate on a float or a Jet; params resolve ``param`` nodes."""
        params = params or {}
        return _eval(self, s, params)

    def eval_jet(self, s: Jet, params: Dict[str, float] = None) -> Jet:
        out = self.eval(s, params)
        if isinstance(out, Jet):
            return out
        return Jet.constant(float(out), s.order)

    def parameters(self) -> List[str]:
        names: List[str] = []
        _collect_params(self, names)
        return names

    def __repr__(self):
        if self.kind == "var":
            return "s"
        if self.kind == "const":
            return repr(self.value)
        if self.kind == "param":
            return self.value
        inner = ", ".join(repr(a) for a in self.args)
        return f"{self.kind}({inner})"


def _parse(data) -> Expr:
    if not isinstance(data, dict):
        raise GrammarError(f"expression node must be an object, got {data!r}")
    if "var" in data:
        if data["var"] != "s":
            raise GrammarError(f"unknown variable {data['var']!r}; only 's'")
        return Expr("var")
    if "const" in data:
        try:
            return Expr("const", float(data["const"]))
        except (TypeError, ValueError):
            raise GrammarError(f"non-numeric constant {data['const']!r}")
    if "param" in data:
        name = data["param"]
        if not isinstance(name, str) or not name:
            raise GrammarError(f"parameter name must be a string, got {name!r}")
        return Expr("param", name)
    if "op" in data:
        op = data["op"]
        args = data.get("args")
        if op not in _UNARY and op not in _BINARY:
            raise GrammarError(f"unknown operation {op!r}")
        if not isinstance(args, (list, tuple)):
            raise GrammarError(f"operation {op!r} needs an args list")
        want = 1 if op in _UNARY else 2
        if len(args) != want:
            raise GrammarError(
                f"operation {op!r} takes {want} argument(s), got {len(args)}"
            )
        parsed = [_parse(a) for a in args]
        if op == "pow" and parsed[1].kind not in ("const", "param"):
            raise GrammarError("pow exponent must be a const or param node")
        return Expr(op, args=parsed)
    raise GrammarError(f"unrecognized expression node {data!r}")


def _collect_params(node: Expr, out: List[str]):
    if node.kind == "param" and node.value not in out:
        out.append(node.value)
    for a in node.args:
        _collect_params(a, out)


def _resolve_param(node: Expr, params: Dict[str, float]) -> float:
    try:
        return float(params[node.value])
    except KeyError:
        raise EvaluationError(
            f"unbound parameter {node.value!r}", node=node
        ) from None


def _eval(node: Expr, s, params):
    kind = node.kind
    if kind == "var":
        return s
    if kind == "const":
        return node.value
    if kind == "param":
        return _resolve_param(node, params)
    a = _eval(node.args[0], s, params)
    if kind == "neg":
        return -a
    if kind in ("sqrt", "log", "exp"):
        try:
            if isinstance(a, Jet):
                return getattr(a, kind)()
            import math

            if kind == "sqrt" and a <= 0.0:
                raise EvaluationError(f"sqrt of non-positive value {a!r}")
            if kind == "log" and a <= 0.0:
                raise EvaluationError(f"log of non-positive value {a!r}")
            return getattr(math, kind)(a)
        except EvaluationError as exc:
            if exc.node is None:
                raise EvaluationError(str(exc), node=node) from None
            raise
    b = _eval(node.args[1], s, params)
    try:
        if kind == "add":
            return a + b
        if kind == "sub":
            return a - b
        if kind == "mul":
            return a * b
        if kind == "div":
            if not isinstance(b, Jet) and b == 0.0:
                raise EvaluationError("division by zero")
            return a / b
        if kind == "pow":
            p = b.value if isinstance(b, Jet) else float(b)
            if isinstance(a, Jet):
                return a**p
            if p != int(p) and a <= 0.0:
                raise EvaluationError(
                    f"non-integer power of non-positive value {a!r}"
                )
            return a**p
    except EvaluationError as exc:
        if exc.node is None:
            raise EvaluationError(str(exc), node=node) from None
        raise
    raise GrammarError(f"unhandled operation {kind!r}")


# -- tiny builder DSL used by the family constructors -----------------------


def var_s() -> Expr:
    return Expr("var")


def const(x: float) -> Expr:
    return Expr("const", float(x))


def param(name: str) -> Expr:
    return Expr("param", name)


def add(a: Expr, b: Expr) -> Expr:
    return Expr("add", args=(a, b))


def sub(a: Expr, b: Expr) -> Expr:
    return Expr("sub", args=(a, b))


def mul(a: Expr, b: Expr) -> Expr:
    return Expr("mul", args=(a, b))


def div(a: Expr, b: Expr) -> Expr:
    return Expr("div", args=(a, b))


def powx(a: Expr, b: Expr) -> Expr:
    return Expr("pow", args=(a, b))


def log(a: Expr) -> Expr:
    return Expr("log", args=(a,))


def exp(a: Expr) -> Expr:
    return Expr("exp", args=(a,))


def sqrt(a: Expr) -> Expr:
    return Expr("sqrt", args=(a,))
