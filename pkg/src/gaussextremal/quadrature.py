"""Composite quadrature rules used across the package.

Everything here works on vectorised integrands: ``f`` receives a 1-D array
of abscissae and must return an array of the same shape.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from .errors import ConvergenceError, DomainError

Integrand = Callable[[np.ndarray], np.ndarray]


@lru_cache(maxsize=None)
def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


@lru_cache(maxsize=None)
def tanh_sinh(level: int) -> tuple[np.ndarray, np.ndarray]:
    """Double-exponential rule on [-1, 1] with step h = 2**-level."""
    h = 2.0 ** -level
    k = np.arange(-int(4.0 / h), int(4.0 / h) + 1)
    t = k * h
    u = 0.5 * np.pi * np.sinh(t)
    x = np.tanh(u)
    w = h * 0.5 * np.pi * np.cosh(t) / np.cosh(u) ** 2
    keep = (np.abs(x) < 1.0) & (w > 1e-300)
    x, w = x[keep], w[keep]
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def panel_rule(breaks, n: int = 32, scheme: str = "gauss_legendre"):
    """Nodes and weights of a composite rule over consecutive breakpoints."""
    breaks = np.asarray(breaks, dtype=float)
    if scheme == "gauss_legendre":
        x0, w0 = gauss_legendre(n)
    elif scheme == "tanh_sinh":
        x0, w0 = tanh_sinh(max(1, int(round(np.log2(n))) - 2))
    else:
        raise DomainError(f"unknown quadrature scheme {scheme!r}")
    a, b = breaks[:-1, None], breaks[1:, None]
    half = 0.5 * (b - a)
    nodes = half * x0[None, :] + 0.5 * (a + b)
    weights = half * w0[None, :]
    return nodes.ravel(), weights.ravel()


def graded_breaks(a: float, b: float, left: int = 0, right: int = 0, inner: int = 1):
    """Breakpoints on [a, b], refined geometrically toward either end.

    ``left`` levels put breakpoints at a + L*2**-k (k = 1..left), ``right``
    levels mirror that at b.  ``inner`` uniform panels fill the middle.
    """
    L = b - a
    pts = [a, b]
    pts.extend(a + L * 2.0 ** -np.arange(1, left + 1))
    pts.extend(b - L * 2.0 ** -np.arange(1, right + 1))
    pts.extend(np.linspace(a, b, inner + 1))
    return np.unique(np.asarray(pts, dtype=float))


@dataclass(frozen=True)
class QuadResult:
    value: float | np.ndarray
    error: float
    evaluations: int


def _half_line(h: Integrand, rtol: float, atol: float, width: float, n: int,
               u_min: float, u_max: float, quiet_panels: int):
    # integrate h(u) over [0, inf) panel by panel; h may be vector valued
    # (leading axis = abscissae).  Low/high order pairs give the error.
    x_lo, w_lo = gauss_legendre(n)
    x_hi, w_hi = gauss_legendre(2 * n)
    total, err, evals, quiet = 0.0, 0.0, 0, 0
    u = 0.0
    while u < u_max:
        a, b = u, min(u + width, u_max)
        half, mid = 0.5 * (b - a), 0.5 * (a + b)
        hi = half * np.tensordot(w_hi, np.asarray(h(half * x_hi + mid)), axes=1)
        lo = half * np.tensordot(w_lo, np.asarray(h(half * x_lo + mid)), axes=1)
        evals += 3 * n
        if not (np.all(np.isfinite(hi)) and np.all(np.isfinite(lo))):
            raise ConvergenceError("non-finite integrand on log-scale panel",
                                   panel=(a, b), partial=np.max(np.abs(total)))
        total = total + hi
        err += float(np.max(np.abs(hi - lo)))
        u = b
        if np.all(np.abs(hi) <= rtol * np.abs(total) + atol):
            quiet += 1
        else:
            quiet = 0
        if u >= u_min and quiet >= quiet_panels:
            return total, err, evals, True
    return total, err, evals, False


def log_quad(f: Integrand, rtol: float = 1e-10, atol: float = 0.0, *,
             width: float = 0.5, n: int = 16, u_min: float = 6.0,
             u_max: float = 690.0, quiet_panels: int = 4) -> QuadResult:
    """Integrate ``f`` over (0, inf) on a logarithmic scale.

    The line is split at 1; (0, 1] is mapped by lam = exp(-u) and [1, inf)
    by lam = exp(u).  Panels of width ``width`` in u are appended until
    ``quiet_panels`` consecutive panels each contribute less than
    ``rtol*|total| + atol``.  Raises :class:`ConvergenceError` if that never
    happens before ``u_max``, which is how divergent tails surface.
    ``f`` may return an array of shape (len(lam), ...) for vector integrands.
    """

    def scaled(lam):
        vals = np.asarray(f(lam))
        return vals * lam.reshape((-1,) + (1,) * (vals.ndim - 1))

    v0, e0, n0, ok0 = _half_line(lambda u: scaled(np.exp(-u)), rtol, atol, width, n,
                                 u_min, u_max, quiet_panels)
    v1, e1, n1, ok1 = _half_line(lambda u: scaled(np.exp(u)), rtol, atol, width, n,
                                 u_min, u_max, quiet_panels)
    if not (ok0 and ok1):
        raise ConvergenceError("log-scale quadrature did not settle",
                               partial_lower=np.max(np.abs(v0)), partial_upper=np.max(np.abs(v1)),
                               settled_lower=ok0, settled_upper=ok1)
    total = v0 + v1
    if np.ndim(total) == 0:
        total = float(total)
    return QuadResult(total, e0 + e1, n0 + n1)


def tail_growth(f: Integrand, direction: int, *, n: int = 16, checkpoints=(10, 20, 40, 80, 160, 320)):
    """Integrals of ``f`` over growing log-ranges toward 0 (-1) or inf (+1).

    Returns the list of increments between checkpoints, which callers use to
    tell convergent tails (increments shrinking geometrically) from divergent
    ones.
    """
    x, w = gauss_legendre(n)
    incs = []
    prev = 0.0
    for c in checkpoints:
        breaks = np.arange(prev, c + 1e-12, 0.5)
        nodes, weights = panel_rule(breaks, n)
        lam = np.exp(direction * nodes)
        with np.errstate(over="ignore", under="ignore", invalid="ignore"):
            vals = f(lam) * lam
        incs.append(float(np.dot(weights, vals)))
        prev = c
    return incs
