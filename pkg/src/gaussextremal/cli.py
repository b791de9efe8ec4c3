"""Command-line entry point: ``gaussextremal <command> [options]``.

Exit status is 0 on success, 1 when a ``verify`` check fails, 2 for invalid
arguments and 3 for numerical failures (with a JSON diagnostic on stderr).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .errors import DomainError, NumericalError
from .extremal import l1_error_quadrature, multi_eval, value_one_dim, value_scaled, QuadratureSpec
from .hilbert import PointConfiguration, bound_check, hls_constants
from .lpinterp import ExtremalEvaluator, truncation_certificate
from .periodic import gaussian_periodic_extremal, parse_circle_measure, subordinated_periodic_extremal
from .specfun import HomogeneousParameter, zeros
from .subordination import RadialFunctionSpec, parse_measure, subordinate_eval, subordinate_value

COMMANDS = ("value", "eval", "verify", "hilbert", "periodic", "sweep")


@dataclass
class RunConfig:
    command: str
    parameters: dict
    output_format: str = "json"
    output_path: str | None = None
    extra: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# parsing helpers


def parse_grid(text: str) -> list[float]:
    """``lin:a:b:n``, ``log:a:b:n`` (geometric), a comma list or one number."""
    text = str(text).strip()
    head, _, rest = text.partition(":")
    if head in ("lin", "log"):
        parts = rest.split(":")
        if len(parts) != 3:
            raise DomainError(f"grid {text!r} must look like {head}:a:b:n")
        try:
            a, b, n = float(parts[0]), float(parts[1]), int(parts[2])
        except ValueError as exc:
            raise DomainError(f"bad grid {text!r}") from exc
        if n < 1:
            raise DomainError("grid needs at least one point")
        if head == "lin":
            return np.linspace(a, b, n).tolist()
        if a <= 0 or b <= 0:
            raise DomainError("log grid endpoints must be positive")
        return np.geomspace(a, b, n).tolist()
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise DomainError(f"cannot parse {text!r} as numbers") from exc


def _check(params: dict) -> None:
    # range validation before any computation
    checks = (("nu", lambda v: v > -1, "nu must exceed -1"),
              ("lambda", lambda v: v > 0 and math.isfinite(v), "lambda must be positive"),
              ("delta", lambda v: v > 0 and math.isfinite(v), "delta must be positive"),
              ("dim", lambda v: v >= 1 and int(v) == v, "dim must be an integer >= 1"),
              ("degree", lambda v: v >= 0 and int(v) == v, "degree must be a nonnegative integer"))
    for key, ok, msg in checks:
        if params.get(key) is None:
            continue
        vals = params[key] if isinstance(params[key], list) else [params[key]]
        if not vals or not all(ok(v) for v in vals):
            raise DomainError(msg)
    side = params.get("side")
    allowed = ("plus", "minus", "both") if params.get("_allow_both") else ("plus", "minus")
    if side is not None and side not in allowed:
        raise DomainError(f"side must be one of {', '.join(allowed)}")


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items() if not str(k).startswith("_")}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else repr(v)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


# ---------------------------------------------------------------------------
# commands


def _cmd_value(pr: dict) -> dict:
    p = HomogeneousParameter(pr["nu"])
    if pr.get("measure"):
        m = parse_measure(pr["measure"])
        res = subordinate_value(p, pr["dim"], pr["delta"], m, pr["side"])
        return dict(value=res.value, error_estimate=res.error_estimate, terms_used=None)
    if pr.get("lambda") is None:
        raise DomainError("value needs --lambda or --measure")
    ev = value_scaled(p, pr["delta"], pr["lambda"], pr["dim"], pr["side"])
    return dict(value=ev.value, terms_used=ev.terms_used, tail_bound=ev.tail_bound)


def _cmd_eval(pr: dict) -> dict:
    p = HomogeneousParameter(pr["nu"])
    pts = np.asarray(parse_grid(pr["points"]))
    dim = pr["dim"]
    vectors = np.zeros((len(pts), dim))
    vectors[:, 0] = pts
    if pr.get("measure"):
        m = parse_measure(pr["measure"])
        spec = RadialFunctionSpec.for_measure(m, dim)
        vals = subordinate_eval(p, dim, pr["delta"], m, spec, vectors, pr["side"], pr["truncation"])
        return dict(points=pts, values=np.atleast_1d(vals), terms_used=pr["truncation"],
                    error_estimate=None, target=spec(np.abs(pts)))
    vals = multi_eval(p, dim, pr["delta"], pr["lambda"], vectors, pr["side"], pr["truncation"])
    kappa = 2.0 / pr["delta"]
    cert = truncation_certificate(p, kappa * kappa * pr["lambda"], pr["side"], pr["truncation"])
    return dict(points=pts, values=np.atleast_1d(vals), target=np.exp(-math.pi * pr["lambda"] * pts ** 2),
                terms_used=pr["truncation"], error_estimate=cert)


def _cmd_verify(pr: dict) -> dict:
    p = HomogeneousParameter(pr["nu"])
    lam, side, rtol = pr["lambda"], pr["side"], pr["rtol"]
    check = pr["check"]
    if check == "quadrature":
        closed = value_one_dim(p, lam, side)
        quad = l1_error_quadrature(p, lam, side, QuadratureSpec(rel_tol=min(rtol, 1e-3) / 10))
        rel = abs(closed.value - quad.value) / max(abs(closed.value), 1e-300)
        ok = rel <= rtol
        return dict(check=check, closed_form=closed.value, quadrature=quad.value, rel_diff=rel,
                    terms_used=closed.terms_used, tail_bound=closed.tail_bound,
                    error_estimate=quad.error_estimate, status="PASS" if ok else "FAIL")
    ev = ExtremalEvaluator(p, lam, side)
    if check == "onesided":
        x = np.linspace(0.0, pr["xmax"], 10_000)
        slack = float(ev.gap(x).min())
        ok = slack >= -rtol
        return dict(check=check, min_slack=slack, grid_points=len(x), terms_used=ev.squared_profile.truncation_count,
                    error_estimate=truncation_certificate(p, lam, side, ev.squared_profile.truncation_count),
                    status="PASS" if ok else "FAIL")
    if check == "interpolation":
        kind = "A" if side == "minus" else "B"
        xi = zeros(p, kind, 20).zeros
        res = float(np.max(np.abs(ev(xi) - np.exp(-math.pi * lam * xi ** 2))))
        ok = res <= rtol
        return dict(check=check, max_residual=res, nodes_checked=len(xi), terms_used=ev.squared_profile.truncation_count,
                    error_estimate=truncation_certificate(p, lam, side, ev.squared_profile.truncation_count),
                    status="PASS" if ok else "FAIL")
    raise DomainError(f"unknown check {check!r}")


def _cmd_hilbert(pr: dict) -> dict:
    if pr.get("sigma") is not None:
        lo, hi = hls_constants(pr["dim"], pr["sigma"], pr["delta"])
        return dict(lower=lo, upper=hi, terms_used=None, error_estimate=None)
    if not pr.get("points"):
        raise DomainError("hilbert needs --points or --sigma")
    cfg = PointConfiguration.from_csv(pr["points"], pr["delta"])
    m = parse_measure(pr["measure"])
    rep = bound_check(cfg, m, pr["side"])
    out = rep.as_dict()
    out.update(count=cfg.count, dim=cfg.dim, terms_used=None, error_estimate=None)
    return out


def _cmd_periodic(pr: dict) -> dict:
    meas = parse_circle_measure(pr["measure"])
    if pr.get("subordination"):
        vs = parse_measure(pr["subordination"])
        poly = subordinated_periodic_extremal(meas, pr["degree"], vs, pr["side"])
    else:
        if pr.get("lambda") is None:
            raise DomainError("periodic needs --lambda or --subordination")
        poly = gaussian_periodic_extremal(meas, pr["degree"], pr["lambda"], pr["side"])
    info = dict(poly.info)
    k = np.arange(-poly.degree, poly.degree + 1)
    info.update(value=info["integral"], error_estimate=abs(info["integral"] - info["value_formula"]),
                terms_used=len(k), coefficients=dict(k=k, real=poly.coefficients.real,
                                                     imag=poly.coefficients.imag))
    return info


def _sweep_point(args):
    nu, lam, side, delta, dim = args
    ev = value_scaled(HomogeneousParameter(nu), delta, lam, dim, side)
    return dict(nu=nu, **{"lambda": lam}, side=side, delta=delta, dim=dim, value=ev.value,
                terms_used=ev.terms_used, tail_bound=ev.tail_bound)


def _cmd_sweep(pr: dict) -> dict:
    sides = ["minus", "plus"] if pr["side"] == "both" else [pr["side"]]
    jobs = [(nu, lam, s, pr["delta"], pr["dim"]) for nu in pr["nu"] for lam in pr["lambda"] for s in sides]
    workers = pr.get("workers") or 1
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_sweep_point, jobs))
    else:
        rows = [_sweep_point(j) for j in jobs]
    return dict(rows=rows, values=[r["value"] for r in rows],
                terms_used=[r["terms_used"] for r in rows], tail_bound=[r["tail_bound"] for r in rows])


_DISPATCH = dict(value=_cmd_value, eval=_cmd_eval, verify=_cmd_verify, hilbert=_cmd_hilbert,
                 periodic=_cmd_periodic, sweep=_cmd_sweep)


# ---------------------------------------------------------------------------
# argument parser


def _add_common(sp, lam_required=False, side_both=False):
    sp.add_argument("--nu", type=float, default=-0.5)
    sp.add_argument("--lambda", dest="lambda_", type=float, required=lam_required)
    sp.add_argument("--delta", type=float, default=2.0)
    sp.add_argument("--dim", type=int, default=1)
    sp.add_argument("--side", default="both" if side_both else "minus")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gaussextremal", allow_abbrev=False,
                                 description="Gaussian extremal functions in de Branges spaces.")
    ap.add_argument("--version", action="version", version=__version__)
    ap.add_argument("--format", choices=("json", "csv"), default="json")
    ap.add_argument("--output", default=None, help="write the report here instead of stdout")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("value", help="optimal L1 value")
    _add_common(sp)
    sp.add_argument("--measure", default=None, help="subordination measure, e.g. power:sigma=1")

    sp = sub.add_parser("eval", help="evaluate the extremal function")
    _add_common(sp)
    sp.add_argument("--points", required=True, help="comma list or lin:a:b:n grid")
    sp.add_argument("--measure", default=None)
    sp.add_argument("--truncation", type=int, default=64)

    sp = sub.add_parser("verify", help="independent consistency checks")
    sp.add_argument("check", choices=("quadrature", "onesided", "interpolation"))
    _add_common(sp, lam_required=True)
    sp.add_argument("--rtol", type=float, default=1e-5)
    sp.add_argument("--xmax", type=float, default=20.0)

    sp = sub.add_parser("hilbert", help="Hilbert-type bounds for spaced points")
    sp.add_argument("--points", default=None, help="CSV file with one point per row")
    sp.add_argument("--delta", type=float, required=True)
    sp.add_argument("--dim", type=int, default=1)
    sp.add_argument("--measure", default="point:1")
    sp.add_argument("--side", default="both")
    sp.add_argument("--sigma", type=float, default=None, help="report HLS constants instead")

    sp = sub.add_parser("periodic", help="periodic extremal trigonometric polynomial")
    sp.add_argument("--measure", default="lebesgue")
    sp.add_argument("--degree", type=int, required=True)
    sp.add_argument("--lambda", dest="lambda_", type=float, default=None)
    sp.add_argument("--subordination", default=None)
    sp.add_argument("--side", default="minus")

    sp = sub.add_parser("sweep", help="optimal values over a parameter grid")
    sp.add_argument("--nu", default="-0.5")
    sp.add_argument("--lambda", dest="lambda_", required=True)
    sp.add_argument("--delta", type=float, default=2.0)
    sp.add_argument("--dim", type=int, default=1)
    sp.add_argument("--side", default="both")
    sp.add_argument("--workers", type=int, default=1)
    return ap


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    params = {k: v for k, v in vars(ns).items() if k not in ("command", "format", "output")}
    if "lambda_" in params:
        params["lambda"] = params.pop("lambda_")
    if ns.command == "sweep":
        params["nu"] = parse_grid(params["nu"])
        params["lambda"] = parse_grid(params["lambda"])
    params["_allow_both"] = ns.command in ("sweep", "hilbert")
    return RunConfig(ns.command, params, ns.format, ns.output)


# ---------------------------------------------------------------------------
# output


def _to_csv(report: dict) -> str:
    buf = io.StringIO()
    rows = report.get("rows")
    if rows is None:
        rows = [{k: v for k, v in report.items() if not isinstance(v, (list, dict))}]
    keys = sorted({k for r in rows for k in r})
    w = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: r.get(k) for k in keys})
    return buf.getvalue()


def run(cfg: RunConfig) -> tuple[int, dict]:
    """Validate, dispatch and time one command; returns (exit code, report)."""
    if cfg.command not in COMMANDS:
        raise DomainError(f"unknown command {cfg.command!r}")
    _check(cfg.parameters)
    start = time.perf_counter()
    result = _DISPATCH[cfg.command](cfg.parameters)
    report = dict(command=cfg.command, inputs=_clean(cfg.parameters), version=__version__)
    report.update(result)
    report["elapsed"] = time.perf_counter() - start
    status = 1 if report.get("status") == "FAIL" else 0
    return status, _clean(report)


def main(argv=None) -> int:
    ap = build_parser()
    ns = ap.parse_args(argv)
    try:
        cfg = config_from_args(ns)
        code, report = run(cfg)
    except DomainError as exc:
        sys.stderr.write(json.dumps(dict(error="invalid_argument", message=str(exc)), sort_keys=True) + "\n")
        return 2
    except NumericalError as exc:
        diag = dict(error=type(exc).__name__, message=str(exc),
                    details=_clean(getattr(exc, "details", {})))
        sys.stderr.write(json.dumps(diag, sort_keys=True, default=repr) + "\n")
        return 3
    text = _to_csv(report) if cfg.output_format == "csv" else json.dumps(report, sort_keys=True, indent=2) + "\n"
    if cfg.output_path:
        with open(cfg.output_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
