"""Gaussian subordination: integrating the Gaussian problem over its width.

A nonnegative measure mu on (0, inf) turns the family e^{-pi lam |x|^2}
into the radial function g_mu(x) = int e^{-pi lam |x|^2} dmu(lam), taken in a
regularised sense when the integral diverges at lam -> 0.  Integrating the
optimal Gaussian minorants (majorants) against mu gives optimal minorants
(majorants) of g_mu, and the optimal values integrate the same way.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np
from scipy import special

from . import specfun
from .errors import ConvergenceError, DomainError, NumericalError
from .extremal import _side, value_scaled
from .lpinterp import DEFAULT_TRUNCATION, ExtremalEvaluator
from .quadrature import log_quad, tail_growth

LAMBDA_RTOL = 1e-9


def gamma_factor(s: float) -> float:
    """gamma(s) = pi^{-s/2} Gamma(s/2); poles at s = 0, -2, -4, ..."""
    half = 0.5 * s
    if half <= 0 and half == math.floor(half):
        raise DomainError(f"gamma factor has a pole at s = {s}")
    return math.pi ** (-half) * special.gamma(half)


@dataclass(frozen=True)
class SubordinationMeasure:
    """Nonnegative measure on (0, inf).

    ``kind`` is one of point_mass, finite_table, power,
    exponential_subordination or density.  Atoms live in ``lams`` /
    ``weights``; absolutely continuous parts are given by ``density_fn``.
    For exponential_subordination ``taus``/``weights`` hold the table of
    exponential rates and their weights.
    """

    kind: str
    lams: tuple = ()
    weights: tuple = ()
    sigma: float | None = None
    taus: tuple = ()
    density_fn: Callable | None = field(default=None, compare=False)
    label: str = ""
    minus_admissible_k: int | None = None
    plus_admissible_k: int | None = None

    def __post_init__(self):
        if self.kind not in ("point_mass", "finite_table", "power", "exponential_subordination", "density"):
            raise DomainError(f"unknown measure kind {self.kind!r}")
        w = np.asarray(self.weights, dtype=float)
        if np.any(~np.isfinite(w)) or np.any(w < 0):
            raise DomainError("measure weights must be finite and nonnegative")
        if self.kind in ("point_mass", "finite_table"):
            lam = np.asarray(self.lams, dtype=float)
            if lam.shape != w.shape or lam.size == 0:
                raise DomainError("atoms need matching, nonempty lambda and weight lists")
            if np.any(~np.isfinite(lam)) or np.any(lam <= 0):
                raise DomainError("atom locations must be positive")
        if self.kind == "exponential_subordination":
            tau = np.asarray(self.taus, dtype=float)
            if tau.shape != w.shape or tau.size == 0 or np.any(tau <= 0):
                raise DomainError("exponential subordination needs positive rates with weights")
        if self.kind == "power" and (self.sigma is None or not math.isfinite(self.sigma)):
            raise DomainError("power measure needs a finite sigma")
        if self.kind == "density" and self.density_fn is None:
            raise DomainError("density measure needs a callable")

    # -- constructors -------------------------------------------------------
    @classmethod
    def point_mass(cls, lam0: float, weight: float = 1.0) -> "SubordinationMeasure":
        return cls("point_mass", (float(lam0),), (float(weight),), label=f"point:{lam0}")

    @classmethod
    def finite_table(cls, lams, weights) -> "SubordinationMeasure":
        return cls("finite_table", tuple(map(float, lams)), tuple(map(float, weights)), label="table")

    @classmethod
    def power(cls, sigma: float) -> "SubordinationMeasure":
        """dmu = lam^{-sigma/2 - 1} dlam, subordinating gamma(-sigma) |x|^sigma."""
        return cls("power", sigma=float(sigma), label=f"power:sigma={sigma}")

    @classmethod
    def exponential_subordination(cls, taus, weights=None) -> "SubordinationMeasure":
        """Measure subordinating sum_i w_i e^{-tau_i |x|}."""
        taus = tuple(map(float, np.atleast_1d(taus)))
        weights = (1.0,) * len(taus) if weights is None else tuple(map(float, np.atleast_1d(weights)))
        return cls("exponential_subordination", weights=weights, taus=taus, label="expsub")

    @classmethod
    def from_density(cls, fn: Callable, label: str = "density") -> "SubordinationMeasure":
        return cls("density", density_fn=fn, label=label)

    # -- structure ----------------------------------------------------------
    @property
    def atoms(self):
        if self.kind in ("point_mass", "finite_table"):
            return np.asarray(self.lams, dtype=float), np.asarray(self.weights, dtype=float)
        return None

    def density(self, lam):
        lam = np.asarray(lam, dtype=float)
        if self.kind == "power":
            return lam ** (-0.5 * self.sigma - 1.0)
        if self.kind == "exponential_subordination":
            out = np.zeros_like(lam)
            for tau, w in zip(self.taus, self.weights):
                with np.errstate(under="ignore"):
                    out = out + w * tau / (2 * math.pi) * np.exp(-tau * tau / (4 * math.pi * lam)) * lam ** -1.5
            return out
        if self.kind == "density":
            return np.asarray(self.density_fn(lam), dtype=float)
        return None

    def log_density(self, lam):
        """log of the density, computed without overflow for extreme lam."""
        lam = np.asarray(lam, dtype=float)
        u = np.log(lam)
        if self.kind == "power":
            return (-0.5 * self.sigma - 1.0) * u
        if self.kind == "exponential_subordination":
            parts = [math.log(w * tau / (2 * math.pi)) - tau * tau / (4 * math.pi * lam) - 1.5 * u
                     for tau, w in zip(self.taus, self.weights) if w > 0]
            return np.logaddexp.reduce(np.array(parts), axis=0) if parts else np.full_like(lam, -np.inf)
        if self.kind == "density":
            with np.errstate(divide="ignore"):
                return np.log(np.asarray(self.density_fn(lam), dtype=float))
        return None

    def integrate(self, f, rtol: float = LAMBDA_RTOL, atol: float = 0.0):
        """int f dmu; ``f`` maps an array of lambdas to values (leading axis).

        Returns (value, error_estimate).
        """
        at = self.atoms
        if at is not None:
            lam, w = at
            vals = np.asarray(f(lam))
            return np.tensordot(w, vals, axes=1), 0.0
        res = log_quad(lambda lam: _times_density(f(lam), self.density(lam)), rtol=rtol, atol=atol,
                       width=1.0, quiet_panels=3)
        return res.value, res.error

    def dilate(self, kappa: float) -> "SubordinationMeasure":
        """mu_kappa(X) = mu(kappa X)."""
        if not kappa > 0:
            raise DomainError("dilation factor must be positive")
        if self.atoms is not None:
            lam, w = self.atoms
            return replace(self, lams=tuple(lam / kappa), minus_admissible_k=None, plus_admissible_k=None)
        base = self.density
        return SubordinationMeasure.from_density(lambda lam: kappa * base(kappa * np.asarray(lam)),
                                                 label=f"{self.label}@{kappa}")


def _times_density(vals, dens):
    vals = np.asarray(vals, dtype=float)
    dens = np.asarray(dens, dtype=float)
    return vals * dens.reshape((-1,) + (1,) * (vals.ndim - 1))


def load_measure_table(path: str, kind: str) -> SubordinationMeasure:
    """Read a two-column CSV (lambda,weight or tau,weight) with a header row."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    data = []
    for row in rows[1:]:
        if row and any(cell.strip() for cell in row):
            data.append((float(row[0]), float(row[1])))
    if not data:
        raise DomainError(f"no rows in {path}")
    a, w = zip(*data)
    if kind == "table":
        return SubordinationMeasure.finite_table(a, w)
    return SubordinationMeasure.exponential_subordination(a, w)


def parse_measure(text: str) -> SubordinationMeasure:
    """Parse ``point:1.0``, ``power:sigma=1``, ``table:path.csv`` or ``expsub:path.csv``."""
    head, _, rest = text.partition(":")
    head = head.strip().lower()
    try:
        if head == "point":
            return SubordinationMeasure.point_mass(float(rest))
        if head == "power":
            key, _, val = rest.partition("=")
            if key.strip() != "sigma":
                raise DomainError("power measure expects sigma=<value>")
            return SubordinationMeasure.power(float(val))
        if head in ("table", "expsub"):
            return load_measure_table(rest, head)
    except ValueError as exc:
        raise DomainError(f"cannot parse measure {text!r}: {exc}") from exc
    raise DomainError(f"unknown measure specification {text!r}")


# ---------------------------------------------------------------------------
# admissibility


def _log_weight(p, side: str, k: int):
    nu = p.nu
    if side == "minus":
        # log of lam^k / (1 + lam^{nu+k+1})
        return lambda lam: -np.logaddexp(-k * np.log(lam), (nu + 1.0) * np.log(lam))
    return lambda lam: -np.logaddexp(0.0, -k * np.log(lam))


def _finite_tail(incs) -> bool:
    incs = np.abs(np.asarray(incs))
    total = incs.sum()
    if not np.all(np.isfinite(incs)):
        return False
    if total == 0:
        return True
    return incs[-1] <= 1e-8 * total and incs[-1] <= incs[-2] + 1e-300


def admissibility_check(m: SubordinationMeasure, p, side: str, k_max: int = 8) -> int | None:
    """Smallest k <= k_max for which the side's admissibility integral is finite."""
    p = specfun._as_param(p)
    side = _side(side)
    if k_max < 1:
        raise DomainError("k_max must be >= 1")
    if m.atoms is not None:
        return 1
    for k in range(1, k_max + 1):
        log_w = _log_weight(p, side, k)

        def f(lam, log_w=log_w):
            return np.exp(log_w(lam) + m.log_density(lam))

        with np.errstate(over="ignore", under="ignore", divide="ignore", invalid="ignore"):
            lower = tail_growth(f, -1)
            upper = tail_growth(f, +1)
        if any(math.isnan(v) for v in lower + upper):
            raise NumericalError("admissibility quadrature produced NaN", k=k, side=side)
        if _finite_tail(lower) and _finite_tail(upper):
            return k
    return None


def _require_admissible(m, p, side):
    declared = m.minus_admissible_k if side == "minus" else m.plus_admissible_k
    if declared is not None:
        return declared
    k = admissibility_check(m, p, side)
    if k is None:
        raise DomainError(f"measure {m.label or m.kind} is not admissible for the {side} side")
    return k


# ---------------------------------------------------------------------------
# values and pointwise evaluation


@dataclass(frozen=True)
class SubordinationResult:
    value: float
    error_estimate: float

    def __float__(self) -> float:
        return float(self.value)


def subordinate_value(p, dim: int, delta: float, m: SubordinationMeasure, side: str) -> SubordinationResult:
    """U_nu^{N+-}(delta, mu) = int U_nu^{N+-}(delta, lam) dmu(lam)."""
    p = specfun._as_param(p)
    side = _side(side)
    _require_admissible(m, p, side)

    def f(lams):
        return np.array([value_scaled(p, delta, float(l), dim, side).value for l in np.ravel(lams)])

    try:
        val, err = m.integrate(f, rtol=LAMBDA_RTOL)
    except ConvergenceError as exc:
        raise ConvergenceError("lambda integral of the optimal values did not converge",
                               **exc.details) from exc
    return SubordinationResult(float(val), float(err))


@dataclass(frozen=True)
class RadialFunctionSpec:
    """Closed form of the subordinated radial function g_mu(r)."""

    closed_form: Callable
    target_dim: int
    label: str = ""
    gamma_factor: Callable = gamma_factor

    def __call__(self, r):
        return self.closed_form(np.abs(np.asarray(r, dtype=float)))

    @classmethod
    def for_measure(cls, m: SubordinationMeasure, dim: int) -> "RadialFunctionSpec":
        """Catalog closed forms for the built-in measure kinds."""
        if m.atoms is not None:
            lam, w = m.atoms
            return cls(lambda r: np.tensordot(w, np.exp(-math.pi * np.multiply.outer(lam, np.asarray(r) ** 2)), 1),
                       dim, "gaussian")
        if m.kind == "power":
            s = m.sigma
            return cls(lambda r: power_target(s, r), dim, f"power {s}")
        if m.kind == "exponential_subordination":
            taus, w = np.asarray(m.taus), np.asarray(m.weights)
            return cls(lambda r: np.tensordot(w, np.exp(-np.multiply.outer(taus, np.asarray(r))), 1),
                       dim, "exponential")
        raise DomainError("no closed form known for a generic density; supply a RadialFunctionSpec")


def power_target(sigma: float, r):
    """gamma(-sigma) r^sigma, the function subordinated by lam^{-sigma/2-1} dlam."""
    sigma = float(sigma)
    if sigma >= 0 and sigma / 2 == math.floor(sigma / 2):
        raise DomainError(f"sigma = {sigma} is a pole of the normalising gamma factor")
    g = gamma_factor(-sigma)
    r = np.abs(np.asarray(r, dtype=float))
    if sigma < 0 and np.any(r == 0):
        raise DomainError("power target is infinite at the origin for sigma < 0")
    with np.errstate(divide="ignore"):
        val = g * r ** sigma
    return val if val.ndim else float(val)


def subordinate_gap(p, dim: int, delta: float, m: SubordinationMeasure, points, side: str,
                    trunc: int = DEFAULT_TRUNCATION):
    """int |target_lam - extremal_lam|(x) dmu(lam) at each point (radius or vector)."""
    return _gap_at_radii(p, delta, m, _radii(points, dim), side, trunc)


def _gap_at_radii(p, delta, m, r, side, trunc):
    p = specfun._as_param(p)
    side = _side(side)
    kappa = 2.0 / delta

    def f(lams):
        out = np.empty((len(np.ravel(lams)), r.size))
        for i, lam in enumerate(np.ravel(lams)):
            ev = ExtremalEvaluator(p, kappa * kappa * float(lam), side, trunc)
            out[i] = ev.gap(r / kappa)
        return out

    val, err = m.integrate(f, rtol=LAMBDA_RTOL, atol=1e-300)
    return np.asarray(val), err


def _radii(points, dim):
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 0:
        return np.abs(pts).reshape(1)
    if dim == 1 and (pts.ndim == 1):
        return np.abs(pts)
    if pts.shape[-1] != dim:
        raise DomainError("point dimension does not match dim")
    return np.linalg.norm(pts.reshape(-1, dim), axis=1)


def subordinate_eval(p, dim: int, delta: float, m: SubordinationMeasure, spec: RadialFunctionSpec,
                     points, side: str, trunc: int = DEFAULT_TRUNCATION):
    """Optimal subordinated minorant (g_mu - int gap dmu) or majorant (g_mu + int gap dmu).

    ``points`` is a radius array (dim 1), a vector of length ``dim`` or an
    array of shape (k, dim).
    """
    side = _side(side)
    r = _radii(points, dim)
    if side == "minus" and np.any(r == 0):
        g0 = spec(np.array([1e-300]))
        if not np.all(np.isfinite(g0)):
            raise DomainError("target is infinite at the origin")
    target = np.asarray(spec(r), dtype=float)
    gap, _ = _gap_at_radii(p, delta, m, r, side, trunc)
    out = target - gap if side == "minus" else target + gap
    pts = np.asarray(points)
    single = pts.ndim == 0 or (dim > 1 and pts.ndim == 1)
    return float(out[0]) if single else out


def q_kernel_radial(m: SubordinationMeasure, dim: int, r, rtol: float = 1e-13) -> np.ndarray:
    """Q_mu at radii ``r``: int lam^{-N/2} e^{-pi r^2 / lam} dmu(lam)."""
    r = np.abs(np.atleast_1d(np.asarray(r, dtype=float))).ravel()

    def f(lams):
        lams = np.asarray(lams)[:, None]
        with np.errstate(under="ignore"):
            return lams ** (-0.5 * dim) * np.exp(-math.pi * r[None, :] ** 2 / lams)

    try:
        val, _ = m.integrate(f, rtol=rtol, atol=1e-300)
    except ConvergenceError as exc:
        raise DomainError(f"Q kernel diverges at radii {r.tolist()}") from exc
    return np.asarray(val, dtype=float)


def q_kernel(m: SubordinationMeasure, dim: int, y, rtol: float = 1e-13):
    """Q_mu(y) = int lam^{-N/2} e^{-pi |y|^2 / lam} dmu(lam).

    ``y`` is one vector of length ``dim`` (a scalar is accepted for dim 1)
    or an array of shape (k, dim).  Divergence raises DomainError.
    """
    y = np.asarray(y, dtype=float)
    if y.ndim == 0 and dim == 1:
        y = y.reshape(1)
    if y.shape[-1] != dim:
        raise DomainError("y must have trailing dimension equal to dim")
    r = np.linalg.norm(y.reshape(-1, dim), axis=1)
    val = q_kernel_radial(m, dim, r, rtol)
    return float(val[0]) if y.ndim == 1 else val.reshape(y.shape[:-1])
