"""Optimal one-sided L1 values for the Gaussian in power-weighted metrics.

For type 2 the optimal values are sums over the real zeros of A_nu (minus)
or B_nu (plus, including the origin):

    U^-(2, lam) = G(lam) - sum_{A(xi)=0} e^{-pi lam xi^2} / (c_nu K(xi, xi))
    U^+(2, lam) = sum_{B(xi)=0} e^{-pi lam xi^2} / (c_nu K(xi, xi)) - G(lam)

with G(lam) = Gamma(nu+1) / (pi lam)^{nu+1}, the weighted mass of the
Gaussian.  Other types follow by dilation and the N-dimensional radial
problem multiplies by half the surface area of the unit sphere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import specfun
from .errors import ConsistencyError, ConvergenceError, DomainError, TruncationError
from .lpinterp import DEFAULT_TRUNCATION, ExtremalEvaluator, _normalise_side
from .quadrature import gauss_legendre
from .specfun import HomogeneousParameter

MAX_ZEROS = 200_000
_EPS = np.finfo(float).eps


def _side(side: str) -> str:
    return "minus" if _normalise_side(side) == "minorant" else "plus"


@dataclass(frozen=True)
class ExtremalValue:
    nu: float
    dim: int
    delta: float
    lam: float
    side: str
    value: float
    terms_used: int
    tail_bound: float

    def as_dict(self) -> dict:
        return dict(nu=self.nu, dim=self.dim, delta=self.delta, lambda_=self.lam, side=self.side,
                    value=self.value, terms_used=self.terms_used, tail_bound=self.tail_bound)


@dataclass(frozen=True)
class QuadratureSpec:
    scheme: str = "gauss_legendre_panels"
    rel_tol: float = 1e-7
    max_panels: int = 20000

    def __post_init__(self):
        if self.scheme not in ("gauss_legendre_panels", "tanh_sinh"):
            raise DomainError(f"unknown scheme {self.scheme!r}")
        if not (0 < self.rel_tol <= 1e-3):
            raise DomainError("rel_tol must lie in (0, 1e-3]")
        if self.max_panels < 8:
            raise DomainError("max_panels must be at least 8")


def gaussian_weighted_norm(p, lam: float) -> float:
    """int_R e^{-pi lam x^2} |x|^{2nu+1} dx = Gamma(nu+1) / (pi lam)^{nu+1}."""
    p = specfun._as_param(p)
    if not lam > 0:
        raise DomainError("lambda must be positive")
    return math.exp(math.lgamma(p.nu + 1) - (p.nu + 1) * math.log(math.pi * lam))


def sphere_factor(dim: int) -> float:
    """Half the surface area of the unit sphere in R^dim, pi^{N/2} / Gamma(N/2)."""
    if int(dim) != dim or dim < 1:
        raise DomainError("dimension must be an integer >= 1")
    return math.pi ** (dim / 2) / math.gamma(dim / 2)


def _zero_sum(p: HomogeneousParameter, lam: float, kind: str):
    # sum over +- pairs of positive zeros, truncated once the next term is
    # negligible and the table tail is certified
    count = 64
    while True:
        table = specfun.zeros(p, kind, count)
        xi = table.zeros
        if kind == "A":
            w = math.pi / (p.c_nu * specfun.eval_b(p, xi) ** 2)
        else:
            w = math.pi / (p.c_nu * specfun.eval_a(p, xi) ** 2)
        terms = 2.0 * w * np.exp(-math.pi * lam * xi * xi)
        csum = np.cumsum(terms)
        small = np.nonzero(terms < 1e-14 * np.maximum(csum, 1e-300))[0]
        for i in small:
            if i + 1 < len(xi):
                sub = specfun.ZeroTable(p.nu, kind, xi[: i + 1])
                tail = 2.0 * sub.tail_estimate(lam)
                if tail < 1e-12:
                    return math.fsum(terms[: i + 1]), i + 1, tail
        if count >= MAX_ZEROS:
            raise TruncationError("zero table too short to certify the sum", zeros=count, lam=lam)
        count = min(4 * count, MAX_ZEROS)


def value_one_dim(p, lam: float, side: str) -> ExtremalValue:
    """U_nu^{1-}(2, lam) or U_nu^{1+}(2, lam) from the zero sums."""
    p = specfun._as_param(p)
    if not (lam > 0 and math.isfinite(lam)):
        raise DomainError("lambda must be positive and finite")
    side = _side(side)
    g = gaussian_weighted_norm(p, lam)
    if side == "minus":
        s, used, tail = _zero_sum(p, lam, "A")
        value = g - s
    else:
        s, used, tail = _zero_sum(p, lam, "B")
        origin = 2.0 * math.pi * (p.nu + 1.0) / p.c_nu
        value = origin + s - g
        used += 1
    # for small lam the sum cancels G to rounding; the true value is
    # smaller than the cancellation noise there
    if abs(value) <= 64 * _EPS * max(g, s) + tail:
        value = 0.0
    if value < 0:
        raise ConsistencyError("optimal value came out negative", value=value, lam=lam, side=side)
    return ExtremalValue(p.nu, 1, 2.0, float(lam), side, float(value), int(used), float(tail))


def value_scaled(p, delta: float, lam: float, dim: int, side: str) -> ExtremalValue:
    """U_nu^{N+-}(delta, lam) through the dilation and dimension laws."""
    p = specfun._as_param(p)
    if not (delta > 0 and math.isfinite(delta)):
        raise DomainError("delta must be positive and finite")
    factor_dim = sphere_factor(dim)
    kappa = 2.0 / delta
    base = value_one_dim(p, kappa * kappa * lam, side)
    scale = kappa ** (2 * p.nu + 2)
    mult = scale * factor_dim
    return ExtremalValue(p.nu, int(dim), float(delta), float(lam), base.side, base.value * mult,
                         base.terms_used, base.tail_bound * mult)


def multi_eval(p, dim: int, delta: float, lam: float, point, side: str, m: int = DEFAULT_TRUNCATION):
    """Radial extremal of type delta for e^{-pi lam |x|^2} in R^dim at ``point``.

    ``point`` is one vector of length ``dim`` or an array of shape (k, dim).
    """
    p = specfun._as_param(p)
    pt = np.asarray(point, dtype=float)
    if pt.shape[-1] != dim:
        raise DomainError("point dimension does not match dim")
    if not delta > 0:
        raise DomainError("delta must be positive")
    kappa = 2.0 / delta
    r = np.linalg.norm(pt, axis=-1)
    ev = ExtremalEvaluator(p, kappa * kappa * lam, side, m)
    return ev(r / kappa)


@dataclass(frozen=True)
class L1Result:
    value: float
    error_estimate: float
    min_integrand: float
    panels: int
    cutoff: float
    tail: float


def _panel_integral(fun, a, b, n, scheme):
    # coarse: one rule per panel; fine: the same rule on both halves
    if scheme == "tanh_sinh":
        from .quadrature import tanh_sinh

        x0, w0 = tanh_sinh(4)
    else:
        x0, w0 = gauss_legendre(n)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    c = 0.5 * (a + b)

    def apply(lo, hi):
        half, mid = 0.5 * (hi - lo)[:, None], 0.5 * (lo + hi)[:, None]
        f = fun((half * x0 + mid).ravel()).reshape(len(lo), -1)
        return half[:, 0] * (f @ w0), float(f.min())

    coarse, m0 = apply(a, b)
    left, m1 = apply(a, c)
    right, m2 = apply(c, b)
    return left + right, coarse, min(m0, m1, m2)


def l1_error_quadrature(p, lam: float, side: str, q: QuadratureSpec | None = None,
                        m: int = DEFAULT_TRUNCATION, cutoff: float = 2.0e4) -> L1Result:
    """Weighted L1 distance between the Gaussian and its type-2 extremal.

    Integrates |gap(x)| |x|^{2nu+1} over R by panels between consecutive
    zeros of the generating structure function.  On the first panel the
    substitution u = x^{2nu+2} removes the weight singularity when
    2nu+1 < 0.  Beyond ``cutoff`` the integrand is replaced by its mean
    asymptotic value, whose integral is added in closed form.
    """
    p = specfun._as_param(p)
    q = q or QuadratureSpec()
    ev = ExtremalEvaluator(p, lam, side, m)
    nu = p.nu
    w_exp = 2 * nu + 1

    def integrand(x):
        return ev.gap(x) * np.abs(x) ** w_exp

    kind = "A" if ev.side == "minorant" else "B"
    count = int(cutoff / math.pi) + 4
    if count + 1 > q.max_panels:
        raise ConvergenceError("cutoff needs more panels than allowed", max_panels=q.max_panels)
    z = specfun.zeros(p, kind, count).zeros
    z = z[z < cutoff]
    x_end = float(z[-1])
    n = 24

    # first panel [0, z0]
    a0 = float(z[0])
    if w_exp < 0:
        e = 2 * nu + 2
        u_end = a0 ** e

        def first(u):
            x = u ** (1.0 / e)
            return ev.gap(x) / e

        hi0, lo0, m0 = _panel_integral(first, [0.0], [u_end], n, q.scheme)
    else:
        hi0, lo0, m0 = _panel_integral(integrand, [0.0], [a0], n, q.scheme)

    hi, lo, m1 = _panel_integral(integrand, z[:-1], z[1:], n, q.scheme)
    half_total = float(hi0.sum() + hi.sum())
    err = float(abs(hi0 - lo0).sum() + np.abs(hi - lo).sum())

    # tail beyond the last zero: mean of A^2 x^{2nu+1} (or B^2) is
    # Gamma^2 4^nu / pi, times |g(-lam)| / x^2 from the leading Watson term
    g0 = abs(float(ev.transform.freq.derivative(-ev.transform.lambda_prime, 0)))
    amp = math.exp(2 * math.lgamma(nu + 1)) * 4.0 ** nu / math.pi
    if kind == "B":
        amp *= 4 * (nu + 1) ** 2
    tail = amp * g0 / x_end
    err += tail / x_end * 10.0
    value = 2.0 * (half_total + tail)
    err = 2.0 * err
    result = L1Result(value, err, min(m0, m1), len(z), x_end, 2.0 * tail)
    if err > q.rel_tol * abs(value):
        raise ConvergenceError("weighted quadrature missed its tolerance", value=value,
                               error_estimate=err, rel_tol=q.rel_tol)
    return result
