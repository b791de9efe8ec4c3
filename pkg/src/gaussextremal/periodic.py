"""One-sided approximation of the periodised Gaussian by trigonometric polynomials.

The target is the theta function

    theta(x, lam) = sum_j e^{-pi lam (j - x)^2}
                  = lam^{-1/2} (1 + 2 sum_{n>=1} e^{-pi n^2 / lam} cos(2 pi n x)),

and the metric is L1 of an even probability measure on R/Z.  If phi_{n+1}
is the degree n+1 orthonormal polynomial of the measure on the unit circle,
the para-orthogonal polynomials A = (phi* + phi)/2 and B = i(phi* - phi)/2
have n+1 simple zeros each on the circle.  The optimal degree-n minorant
(majorant) is the Hermite interpolant of theta at the zeros of A (of B).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import linalg, optimize

from .errors import ConsistencyError, ConvergenceError, DomainError, IllConditionedError
from .subordination import SubordinationMeasure

THETA_SEAM = 1.0
_TWO_PI = 2.0 * math.pi


# ---------------------------------------------------------------------------
# theta function


def _theta_parts(x, lam: float, derivative: bool):
    if not (lam > 0 and math.isfinite(lam)):
        raise DomainError("lambda must be positive and finite")
    x = np.asarray(x, dtype=float)
    if lam >= THETA_SEAM:
        frac = x - np.floor(x)
        jmax = int(math.ceil(math.sqrt(40.0 / (math.pi * lam)))) + 1
        j = np.arange(-jmax, jmax + 2)
        d = j - frac[..., None]
        e = np.exp(-math.pi * lam * d * d)
        if derivative:
            return (_TWO_PI * lam * d * e).sum(-1)
        return e.sum(-1)
    nmax = int(math.ceil(math.sqrt(40.0 * lam / math.pi))) + 1
    n = np.arange(1, nmax + 1)
    e = np.exp(-math.pi * n * n / lam)
    arg = _TWO_PI * np.multiply.outer(x, n)
    if derivative:
        return lam ** -0.5 * (-2.0 * _TWO_PI * n * e * np.sin(arg)).sum(-1)
    return lam ** -0.5 * (1.0 + 2.0 * (e * np.cos(arg)).sum(-1))


def theta3(x, lam: float):
    """lam^{-1/2} theta_3(x, i/lam) = sum_j e^{-pi lam (j - x)^2}.

    The Gaussian sum is used for lam >= 1 and the dual cosine series below.
    """
    val = _theta_parts(x, lam, False)
    return val if np.ndim(val) else float(val)


def theta3_prime(x, lam: float):
    """Derivative of theta3 in x."""
    val = _theta_parts(x, lam, True)
    return val if np.ndim(val) else float(val)


# ---------------------------------------------------------------------------
# measures on the circle


@dataclass(frozen=True)
class EvenCircleMeasure:
    """Even probability measure on R/Z described by its moments.

    ``moments[m]`` is int e^{-2 pi i m x} dtheta(x) for m = 0..degree_support;
    for the Lebesgue measure the list is implicit and unbounded.
    """

    representation: str
    moments: np.ndarray = field(default_factory=lambda: np.array([1.0]))
    density: Callable | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.representation not in ("lebesgue", "density", "moments"):
            raise DomainError(f"unknown representation {self.representation!r}")
        c = np.asarray(self.moments)
        if np.iscomplexobj(c):
            if np.max(np.abs(c.imag)) > 1e-12 * max(1.0, np.max(np.abs(c.real))):
                raise DomainError("moments of an even measure must be real")
            c = c.real
        c = np.array(c, dtype=float)
        if c.size == 0 or not np.all(np.isfinite(c)):
            raise DomainError("moments must be finite and nonempty")
        if abs(c[0] - 1.0) > 1e-12:
            raise DomainError("a probability measure has zeroth moment 1")
        c.setflags(write=False)
        object.__setattr__(self, "moments", c)

    @property
    def degree_support(self) -> float:
        return math.inf if self.representation == "lebesgue" else len(self.moments) - 1

    def moment(self, k: int) -> float:
        k = abs(int(k))
        if self.representation == "lebesgue":
            return 1.0 if k == 0 else 0.0
        if k >= len(self.moments):
            raise DomainError(f"moment {k} beyond the supported degree {len(self.moments) - 1}")
        return float(self.moments[k])

    def moment_array(self, count: int) -> np.ndarray:
        return np.array([self.moment(k) for k in range(count)])

    @classmethod
    def lebesgue(cls) -> "EvenCircleMeasure":
        return cls("lebesgue")

    @classmethod
    def from_density(cls, fn: Callable, samples: int = 4096) -> "EvenCircleMeasure":
        """Measure with density proportional to ``fn`` on [0, 1)."""
        x = np.arange(samples) / samples
        w = np.asarray(fn(x), dtype=float)
        return cls._from_samples(w, fn)

    @classmethod
    def from_samples(cls, weights) -> "EvenCircleMeasure":
        """Density sampled on the uniform grid j/G, j = 0..G-1 (trapezoid moments)."""
        return cls._from_samples(np.asarray(weights, dtype=float), None)

    @classmethod
    def _from_samples(cls, w, fn):
        if np.any(~np.isfinite(w)) or np.any(w < 0) or w.sum() <= 0:
            raise DomainError("density must be nonnegative, finite and not identically zero")
        n = len(w)
        f = np.fft.fft(w) / w.sum()
        half = n // 2
        if np.max(np.abs(f[1:half].imag)) > 1e-10:
            raise DomainError("density is not even")
        if np.max(np.abs(w - np.roll(w[::-1], 1))) > 1e-10 * np.max(w):
            raise DomainError("density is not even")
        c = f[:half].real.copy()
        c[0] = 1.0
        return cls("density", c, fn)

    @classmethod
    def from_csv(cls, path: str, kind: str) -> "EvenCircleMeasure":
        """``kind`` is "density" (columns x, weight) or "moments" (columns m, c_m)."""
        with open(path, newline="") as fh:
            rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
        try:
            data = np.array([[float(c) for c in r[:2]] for r in rows[1:]])
        except ValueError as exc:
            raise DomainError(f"cannot parse {path}: {exc}") from exc
        if kind == "density":
            order = np.argsort(data[:, 0])
            return cls.from_samples(data[order, 1])
        order = np.argsort(data[:, 0])
        return cls("moments", data[order, 1])

    def integrate(self, fn: Callable, samples: int = 8192) -> float:
        """int fn dtheta for a smooth 1-periodic function (density/lebesgue)."""
        x = (np.arange(samples) + 0.5) / samples
        if self.representation == "lebesgue":
            return float(np.mean(fn(x)))
        if self.density is None:
            raise DomainError("pointwise integration needs a density")
        w = self.density(x)
        return float(np.sum(w * fn(x)) / np.sum(w))


def parse_circle_measure(text: str) -> EvenCircleMeasure:
    """``lebesgue``, ``density:path.csv`` or ``moments:path.csv``."""
    head, _, rest = text.partition(":")
    head = head.strip().lower()
    if head == "lebesgue":
        return EvenCircleMeasure.lebesgue()
    if head in ("density", "moments"):
        return EvenCircleMeasure.from_csv(rest, head)
    raise DomainError(f"unknown circle measure {text!r}")


# ---------------------------------------------------------------------------
# orthonormal polynomials


def _poly_on_circle(coeffs, xi):
    z = np.exp(1j * _TWO_PI * np.asarray(xi, dtype=float))
    return np.polynomial.polynomial.polyval(z, coeffs)


@dataclass(frozen=True)
class OpucBasis:
    """phi_{n+1}, its reversal and the para-orthogonal pair with their zeros."""

    measure: EvenCircleMeasure
    n: int
    family: np.ndarray  # column k holds the coefficients of phi_k, k = 0..n+1
    phi: np.ndarray
    phi_star: np.ndarray
    a_poly: np.ndarray
    b_poly: np.ndarray
    nodes_a: np.ndarray
    nodes_b: np.ndarray

    def rotated(self, xi):
        """phi_{n+1}(e^{2 pi i xi}) e^{-pi i (n+1) xi}; A and B are its real and imaginary parts."""
        xi = np.asarray(xi, dtype=float)
        return _poly_on_circle(self.phi, xi) * np.exp(-1j * math.pi * (self.n + 1) * xi)


def _node_scan(fun, count: int, n: int):
    # zeros in [0, 1) of a real function, bracketed on an offset grid
    grid_n = 256 * (n + 1)
    h = 1.0 / grid_n
    grid = np.arange(grid_n + 1) * h - 0.5 * h
    vals = fun(grid)
    idx = np.nonzero(np.signbit(vals[:-1]) != np.signbit(vals[1:]))[0]
    roots = [optimize.brentq(lambda t: float(fun(np.array([t]))[0]), grid[i], grid[i + 1], xtol=1e-15, rtol=1e-15)
             for i in idx]
    roots = np.sort(np.mod(np.asarray(roots), 1.0))
    roots = np.where(np.abs(roots - 1.0) < 1e-13, 0.0, roots)
    if len(roots) != count:
        raise ConsistencyError("wrong number of para-orthogonal zeros on the circle",
                               found=len(roots), expected=count)
    return np.sort(roots)


def opuc(measure: EvenCircleMeasure, n: int) -> OpucBasis:
    """Orthonormal polynomials up to degree n+1 and the node sets of degree n+1."""
    if int(n) != n or n < 0:
        raise DomainError("degree must be a nonnegative integer")
    n = int(n)
    if n + 1 > measure.degree_support:
        raise DomainError(f"degree {n} needs moments up to {n + 1}")
    c = measure.moment_array(n + 2)
    gram = linalg.toeplitz(c)
    try:
        chol = linalg.cholesky(gram, lower=True)
    except linalg.LinAlgError as exc:
        raise IllConditionedError("moment Gram matrix is not positive definite", degree=n) from exc
    diag = np.diag(chol)
    if diag.min() < 1e-7 * diag.max():
        raise IllConditionedError("moment Gram matrix is numerically singular", degree=n,
                                  pivot_ratio=float(diag.min() / diag.max()))
    family = linalg.solve_triangular(chol, np.eye(n + 2), lower=True).T  # = L^{-T}
    phi = family[:, n + 1].copy()
    phi_star = phi[::-1].copy()
    a_poly = 0.5 * (phi_star + phi)
    b_poly = 0.5j * (phi_star - phi)
    rot = lambda xi: _poly_on_circle(phi, xi) * np.exp(-1j * math.pi * (n + 1) * xi)
    nodes_a = _node_scan(lambda xi: rot(xi).real, n + 1, n)
    nodes_b = _node_scan(lambda xi: rot(xi).imag, n + 1, n)
    for arr in (family, phi, phi_star, a_poly, b_poly, nodes_a, nodes_b):
        arr.setflags(write=False)
    return OpucBasis(measure, n, family, phi, phi_star, a_poly, b_poly, nodes_a, nodes_b)


def kernel_diag_circle(b: OpucBasis, xi):
    """K_n(e^{2 pi i xi}, e^{2 pi i xi}) = sum_{k<=n} |phi_k|^2."""
    xi = np.asarray(xi, dtype=float)
    z = np.exp(1j * _TWO_PI * xi)
    vals = np.stack([np.polynomial.polynomial.polyval(z, b.family[:, k]) for k in range(b.n + 1)])
    k = np.sum(np.abs(vals) ** 2, axis=0)
    return k if np.ndim(k) else float(k)


def kernel_circle(b: OpucBasis, z, w):
    """Christoffel-Darboux form (phi*(z) conj(phi*(w)) - phi(z) conj(phi(w))) / (1 - conj(w) z)."""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    pv = np.polynomial.polynomial.polyval
    z, w = np.broadcast_arrays(z, w)
    num = pv(z, b.phi_star) * np.conj(pv(w, b.phi_star)) - pv(z, b.phi) * np.conj(pv(w, b.phi))
    den = 1.0 - np.conj(w) * z
    near = np.abs(den) < 1e-6
    out = np.where(near, 0.0, num / np.where(near, 1.0, den))
    if np.any(near):
        # the quotient cancels near the diagonal; sum the family instead
        direct = sum(pv(z[near], b.family[:, k]) * np.conj(pv(w[near], b.family[:, k]))
                     for k in range(b.n + 1))
        out[near] = direct
    return out


# ---------------------------------------------------------------------------
# trigonometric polynomials and the extremal construction


@dataclass(frozen=True)
class TrigPolynomial:
    """m(x) = sum_{k=-n}^{n} a_k e^{2 pi i k x}; ``coefficients[k + n] = a_k``."""

    degree: int
    coefficients: np.ndarray
    info: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        a = np.array(self.coefficients, dtype=complex)
        if a.shape != (2 * self.degree + 1,):
            raise DomainError("need 2n+1 coefficients")
        if np.max(np.abs(a - np.conj(a[::-1]))) > 1e-12 * max(1.0, np.max(np.abs(a))):
            raise DomainError("coefficients must satisfy a_{-k} = conj(a_k)")
        a.setflags(write=False)
        object.__setattr__(self, "coefficients", a)

    @classmethod
    def from_real(cls, c0: float, cos_c, sin_c, info=None) -> "TrigPolynomial":
        cos_c = np.asarray(cos_c, dtype=float)
        sin_c = np.asarray(sin_c, dtype=float)
        n = len(cos_c)
        pos = 0.5 * (cos_c - 1j * sin_c)
        a = np.concatenate([np.conj(pos[::-1]), [c0], pos])
        return cls(n, a, info or {})

    def coefficient(self, k: int) -> complex:
        if abs(k) > self.degree:
            return 0.0
        return complex(self.coefficients[k + self.degree])

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        k = np.arange(-self.degree, self.degree + 1)
        val = (np.exp(1j * _TWO_PI * np.multiply.outer(x, k)) @ self.coefficients).real
        return val if val.ndim else float(val)

    def derivative(self, x):
        x = np.asarray(x, dtype=float)
        k = np.arange(-self.degree, self.degree + 1)
        val = (np.exp(1j * _TWO_PI * np.multiply.outer(x, k)) @ (1j * _TWO_PI * k * self.coefficients)).real
        return val if val.ndim else float(val)

    def integral(self, measure: EvenCircleMeasure) -> float:
        """int m dtheta = sum a_k conj(c_k) with c_k the measure moments."""
        k = np.arange(-self.degree, self.degree + 1)
        c = np.array([measure.moment(int(j)) for j in k])
        return float(np.real(np.sum(self.coefficients * c)))

    @property
    def is_even(self) -> bool:
        a = self.coefficients
        return bool(np.max(np.abs(a.imag)) <= 1e-12 * max(1.0, np.max(np.abs(a))))


def _side(side: str) -> str:
    s = str(side).lower()
    if s in ("minus", "minorant", "lower", "-"):
        return "minus"
    if s in ("plus", "majorant", "upper", "+"):
        return "plus"
    raise DomainError(f"side must be minus or plus, got {side!r}")


def _hermite_solve(basis: OpucBasis, side: str, values, slopes):
    # unknowns c0, c_1..c_n, s_1..s_n; equations: values then derivatives
    n = basis.n
    nodes = basis.nodes_a if side == "minus" else basis.nodes_b
    k = np.arange(1, n + 1)
    arg = _TWO_PI * np.outer(nodes, k)
    val_rows = np.hstack([np.ones((n + 1, 1)), np.cos(arg), np.sin(arg)])
    der_rows = np.hstack([np.zeros((n + 1, 1)), -_TWO_PI * k * np.sin(arg), _TWO_PI * k * np.cos(arg)])
    rows = np.vstack([val_rows, der_rows])
    rhs = np.concatenate([values, slopes])
    if side == "minus":
        drop = n + 1 + int(np.argmax(nodes))
    else:
        drop = n + 1 + int(np.argmin(np.abs(nodes)))
    keep = np.ones(len(rhs), dtype=bool)
    keep[drop] = False
    mat = rows[keep]
    cond = np.linalg.cond(mat)
    if not np.isfinite(cond) or cond > 1e12:
        raise IllConditionedError("Hermite system is ill-conditioned", condition=float(cond))
    sol = np.linalg.solve(mat, rhs[keep])
    residual = rows @ sol - rhs
    kept_res = float(np.max(np.abs(residual[keep]))) if keep.any() else 0.0
    return sol, kept_res, float(abs(residual[drop])), float(cond), nodes


def _finish(basis, side, sol, kept_res, dropped_res, cond, nodes, target, target_values, check_grid):
    n = basis.n
    poly = TrigPolynomial.from_real(sol[0], sol[1:n + 1], sol[n + 1:])
    grid = np.concatenate([np.arange(check_grid) / check_grid, nodes])
    h = target(grid)
    diff = h - poly(grid) if side == "minus" else poly(grid) - h
    slack = float(diff.min())
    scale = max(1.0, float(np.max(np.abs(h))))
    if slack < -1e-8 * scale:
        raise ConsistencyError("constructed polynomial is not one-sided", slack=slack)
    kn = kernel_diag_circle(basis, nodes)
    formula = float(np.sum(target_values / kn))
    info = dict(side=side, nodes=nodes.tolist(), kept_residual=kept_res, dropped_residual=dropped_res,
                condition=cond, min_slack=slack, integral=poly.integral(basis.measure),
                value_formula=formula)
    return TrigPolynomial(poly.degree, poly.coefficients, info)


def gaussian_periodic_extremal(measure: EvenCircleMeasure, n: int, lam: float, side: str,
                               check_grid: int = 10_000) -> TrigPolynomial:
    """Optimal degree-n minorant or majorant of theta3(., lam) in L1(measure).

    The ``info`` dictionary reports the nodes, residuals of the kept and
    dropped Hermite equations, the minimum one-sided slack on a grid, the
    integral against the measure and the node-sum value formula.
    """
    side = _side(side)
    basis = opuc(measure, n)
    nodes = basis.nodes_a if side == "minus" else basis.nodes_b
    values = theta3(nodes, lam)
    slopes = theta3_prime(nodes, lam)
    sol, kr, dr, cond, nodes = _hermite_solve(basis, side, values, slopes)
    return _finish(basis, side, sol, kr, dr, cond, nodes, lambda x: theta3(x, lam), values, check_grid)


def h_varsigma(vs: SubordinationMeasure, x, derivative: bool = False):
    """h(x) = int {theta3(x, lam) - theta3(1/2, lam)} dvs(lam) (or its x-derivative)."""
    x = np.atleast_1d(np.asarray(x, dtype=float))

    def f(lams):
        out = np.empty((len(np.ravel(lams)), x.size))
        for i, lam in enumerate(np.ravel(lams)):
            if derivative:
                out[i] = theta3_prime(x, float(lam))
            else:
                out[i] = theta3(x, float(lam)) - theta3(0.5, float(lam))
        return out

    try:
        val, _ = vs.integrate(f, rtol=1e-12, atol=1e-300)
    except ConvergenceError as exc:
        raise DomainError("h diverges at the requested points for this measure") from exc
    val = np.asarray(val, dtype=float)
    return val if val.size > 1 else float(val[0])


def subordinated_periodic_extremal(measure: EvenCircleMeasure, n: int, vs: SubordinationMeasure,
                                   side: str, check_grid: int = 2_000) -> TrigPolynomial:
    """Optimal degree-n minorant or majorant of h_vs in L1(measure).

    The Hermite matrix does not depend on lam, so integrating the fixed-lam
    coefficients over vs equals solving once with integrated data.
    """
    side = _side(side)
    basis = opuc(measure, n)
    nodes = basis.nodes_a if side == "minus" else basis.nodes_b
    values = np.atleast_1d(h_varsigma(vs, nodes))
    slopes = np.atleast_1d(h_varsigma(vs, nodes, derivative=True))
    sol, kr, dr, cond, nodes = _hermite_solve(basis, side, values, slopes)

    def target(x):
        return np.atleast_1d(h_varsigma(vs, x))

    return _finish(basis, side, sol, kr, dr, cond, nodes, target, values, check_grid)
