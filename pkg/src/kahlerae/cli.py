"""Command-line frontend.

Commands::

    kahlerae curvature  --family burns-log --lambda 1 --r 0.1:10:50log
    kahlerae mass       --family volume --lambda 0.1
    kahlerae sweep      --family burns-log --lambdas 1,0.1,0.01,0.001
    kahlerae ma-solve   --density density.json
    kahlerae verify-inequality --family burns-log --lambda 1
    kahlerae decay      --family volume --lambda 1 [--window 100:10000]

Exit codes: 0 success, 1 numerical failure (tolerance, extrapolation,
integrability, or a violated inequality), 2 usage or parse error.  CSV uses
17 significant digits so identical configurations are byte-identical.  The
environment variable ``KAHLERAE_TOL`` overrides the default quadrature
tolerances.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from typing import List, Optional

import numpy as np

from . import families
from .curvature import curvature_rows, write_curvature_csv
from .errors import (
    EvaluationError,
    ExtrapolationUnreliable,
    GrammarError,
    KahlerAEError,
    NotIntegrable,
    NotKaehlerHere,
    ToleranceFailure,
)
from .expressions import Expr
from .mass import mass_inequality_report
from .mongeampere import VolumeDensity, solve_potential, verify_volume
from .profiles import RadialProfile, estimate_decay, profile_from_json, profile_to_json

_USAGE_ERRORS = (GrammarError, ValueError)
_NUMERICAL_ERRORS = (
    ToleranceFailure,
    ExtrapolationUnreliable,
    NotIntegrable,
    NotKaehlerHere,
    EvaluationError,
)


def _load_profile(args) -> RadialProfile:
    if getattr(args, "profile", None):
        with open(args.profile, "r", encoding="utf-8") as fh:
            return profile_from_json(fh.read())
    name = (args.family or "").replace("-", "_")
    if name == "euclidean":
        return families.euclidean_profile()
    lam = args.lam
    if lam is None:
        raise ValueError(f"--lambda is required for family {args.family!r}")
    return families.make_profile(families.FamilySpec(name, lam))


def _parse_r_grid(text: str) -> List[float]:
    """Grid syntax start:stop:N or start:stop:Nlog."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"bad r-grid {text!r}; expected start:stop:N[log]")
    start, stop = float(parts[0]), float(parts[1])
    tail = parts[2]
    logspace = tail.endswith("log")
    n = int(tail[:-3] if logspace else tail)
    if n < 1 or not (0.0 <= start < stop):
        raise ValueError(f"bad r-grid {text!r}")
    if logspace:
        if start <= 0.0:
            raise ValueError("log grid requires start > 0")
        return list(np.geomspace(start, stop, n))
    return list(np.linspace(start, stop, n))


def _open_output(args):
    if getattr(args, "output", None):
        return open(args.output, "w", encoding="utf-8")
    return sys.stdout


def _cmd_curvature(args) -> int:
    profile = _load_profile(args)
    rows = curvature_rows(profile, _parse_r_grid(args.r))
    fh = _open_output(args)
    try:
        write_curvature_csv(rows, fh)
    finally:
        if fh is not sys.stdout:
            fh.close()
    return 0


def _cmd_mass(args) -> int:
    profile = _load_profile(args)
    report = mass_inequality_report(profile, lam=args.lam)
    fh = _open_output(args)
    try:
        fh.write(report.to_json() + "\n")
    finally:
        if fh is not sys.stdout:
            fh.close()
    return 0


def _cmd_sweep(args) -> int:
    name = args.family.replace("-", "_")
    lambdas = [float(x) for x in args.lambdas.split(",") if x]
    if not lambdas:
        raise ValueError("--lambdas must list at least one value")
    rows = families.sweep(name, lambdas)
    fh = _open_output(args)
    try:
        families.write_sweep_csv(rows, fh)
    finally:
        if fh is not sys.stdout:
            fh.close()
    return 0


def _cmd_ma_solve(args) -> int:
    with open(args.density, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise GrammarError("density JSON must be an object")
    params = {k: float(v) for k, v in (data.get("params") or {}).items()}
    if args.lam is not None:
        params["lambda"] = args.lam
    f_node = data.get("f", data.get("volume_density"))
    if f_node is None:
        raise GrammarError("density JSON needs an 'f' expression")
    density = VolumeDensity(
        f=Expr.from_json(f_node),
        m=int(data.get("dimension", 2)),
        params=params,
        label=data.get("label", "density"),
    )
    profile = solve_potential(density)
    grid = np.geomspace(1e-4, 1e4, 161)
    residual = verify_volume(profile, density, grid)
    out = {
        "schema": "1",
        "profile": profile_to_json(profile),
        "residual": residual,
    }
    fh = _open_output(args)
    try:
        fh.write(json.dumps(out, sort_keys=True) + "\n")
    finally:
        if fh is not sys.stdout:
            fh.close()
    return 0


def _cmd_verify_inequality(args) -> int:
    profile = _load_profile(args)
    report = mass_inequality_report(profile, lam=args.lam)
    print(report.to_json())
    if report.slack < -1e-6:
        print(
            f"FAIL: slack {report.slack:.3e} < -1e-6 "
            "(mass inequality violated numerically)",
            file=sys.stderr,
        )
        return 1
    return 0


def _cmd_decay(args) -> int:
    profile = _load_profile(args)
    if args.window:
        lo, hi = (float(x) for x in args.window.split(":"))
    else:
        lo, hi = 1e2, 1e4
    est = estimate_decay(profile, (lo, hi))
    out = {
        "schema": "1",
        "b": est.b,
        "tau": est.tau,
        "residual": est.residual,
        "tau_grad": est.tau_grad,
        "tau_hess": est.tau_hess,
    }
    print(json.dumps(out, sort_keys=True))
    return 0


def _add_profile_args(p: argparse.ArgumentParser, lam_required: bool = False):
    p.add_argument("--family", help="euclidean, burns-log, burns-log-prime, volume")
    p.add_argument("--profile", help="path to a profile JSON description")
    p.add_argument("--lambda", dest="lam", type=float, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kahlerae",
        description="Radial AE Kahler metrics on C^2: curvature, mass, diagnostics",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("curvature", help="CSV of Ricci eigenvalues and scalar")
    _add_profile_args(p)
    p.add_argument("--r", default="0.1:10:50log", help="grid start:stop:N[log]")
    p.add_argument("--output", "-o", default=None)
    p.set_defaults(fn=_cmd_curvature)

    p = sub.add_parser("mass", help="JSON mass report")
    _add_profile_args(p)
    p.add_argument("--output", "-o", default=None)
    p.set_defaults(fn=_cmd_mass)

    p = sub.add_parser("sweep", help="lambda-sweep CSV for one family")
    p.add_argument("--family", required=True)
    p.add_argument("--lambdas", default="1,0.1,0.01,0.001")
    p.add_argument("--output", "-o", default=None)
    p.set_defaults(fn=_cmd_sweep)

    p = sub.add_parser("ma-solve", help="solve the radial Monge-Ampere equation")
    p.add_argument("--density", required=True, help="density JSON path")
    p.add_argument("--lambda", dest="lam", type=float, default=None)
    p.add_argument("--output", "-o", default=None)
    p.set_defaults(fn=_cmd_ma_solve)

    p = sub.add_parser("verify-inequality", help="check slack >= -1e-6")
    _add_profile_args(p)
    p.set_defaults(fn=_cmd_verify_inequality)

    p = sub.add_parser("decay", help="fit the AE decay constants (b, tau)")
    _add_profile_args(p)
    p.add_argument("--window", default=None, help="r window lo:hi")
    p.set_defaults(fn=_cmd_decay)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except _USAGE_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except _NUMERICAL_ERRORS as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 1
    except KahlerAEError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
