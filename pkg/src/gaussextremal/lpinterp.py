"""Laguerre-Polya interpolation of the Gaussian.

A Laguerre-Polya function F(z) = z^k prod (1 - z/xi_j) with positive zeros
has a reciprocal that is a two-sided Laplace transform,

    1/F(z) = int_{-inf}^{0} g(t) e^{-z t} dt,

of a one-signed *frequency function* g vanishing for t > 0.  The transform

    T(F, lam, z) = e^{-lam z} - F(z) int_0^lam g(w - lam) e^{-z w} dw

is entire, interpolates e^{-lam z} at the zeros of F and lies on one side
of it.  With F built from the squared structure functions A_nu^2 and
B_nu^2 and z = x^2, lam = pi*lambda, this produces the optimal minorant and
majorant of the Gaussian e^{-pi lambda x^2}.

Frequency functions are stored in exponential-polynomial form

    g(t) = c0 + sum_j e^{zeta_j t} (alpha_j t + beta_j),   t < 0,

which covers profiles with simple and double zeros exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy import integrate

from . import specfun
from .errors import ConvergenceError, DomainError, NumericalError
from .quadrature import gauss_legendre, graded_breaks, panel_rule
from .specfun import HomogeneousParameter

DEFAULT_TRUNCATION = 64
# Watson expansion of the w-integral is used once Re(z)*lam exceeds this.
WATSON_THRESHOLD = 200.0
WATSON_TERMS = 14
_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class LaguerrePolyaProfile:
    """Positive zeros (with multiplicity) and origin order of F.

    ``structure`` is set for the squared structure-function profiles
    (A_nu^2 with origin order 0, B_nu^2 with origin order 1).  For those
    the stored zeros are a truncation of an infinite list and F itself is
    evaluated exactly through the Bessel functions.
    """

    zeros: np.ndarray
    multiplicity: np.ndarray
    origin_order: int = 0
    reciprocal_tail: float = 0.0
    structure: tuple | None = None

    def __post_init__(self):
        z = np.array(self.zeros, dtype=float).ravel()
        mult = np.array(self.multiplicity, dtype=int).ravel()
        if z.shape != mult.shape:
            raise DomainError("zeros and multiplicity must have the same length")
        if np.any(~np.isfinite(z)) or np.any(z <= 0):
            raise DomainError("profile zeros must be finite and strictly positive")
        if np.any(np.diff(z) < 0):
            raise DomainError("profile zeros must be nondecreasing")
        if np.any(np.diff(z) == 0):
            raise DomainError("repeated zeros must be given through multiplicity")
        if np.any((mult < 1) | (mult > 2)):
            raise DomainError("only simple and double zeros are supported")
        if self.origin_order not in (0, 1):
            raise DomainError("origin order must be 0 or 1")
        if not (self.reciprocal_tail >= 0 and math.isfinite(self.reciprocal_tail)):
            raise DomainError("reciprocal_tail must be finite and nonnegative")
        z.setflags(write=False)
        mult.setflags(write=False)
        object.__setattr__(self, "zeros", z)
        object.__setattr__(self, "multiplicity", mult)

    @classmethod
    def finite(cls, zeros, origin_order: int = 0, multiplicity=None) -> "LaguerrePolyaProfile":
        """Profile of the polynomial z^k prod (1 - z/xi)^p; repeated values are merged."""
        z = np.sort(np.asarray(zeros, dtype=float).ravel())
        if multiplicity is None:
            vals, counts = np.unique(z, return_counts=True)
            return cls(vals, counts, origin_order)
        return cls(z, multiplicity, origin_order)

    @classmethod
    def squared_structure(cls, p, kind: str, m: int = DEFAULT_TRUNCATION) -> "LaguerrePolyaProfile":
        """Profile of A_nu(sqrt z)^2 (kind "A") or 4(nu+1)^2 B_nu(sqrt z)^2 (kind "B")."""
        p = specfun._as_param(p)
        kind = kind.upper()
        table = specfun.zeros(p, kind, m).zeros
        order = p.nu if kind == "A" else p.nu + 1.0
        # sum over all zeros of j_{order,k}^{-2} is 1/(4(order+1))
        tail = 2.0 * max(0.25 / (order + 1.0) - float(np.sum(table ** -2.0)), 0.0)
        return cls(table ** 2, np.full(m, 2), 0 if kind == "A" else 1, tail, (p.nu, kind))

    @property
    def truncation_count(self) -> int:
        return len(self.zeros)

    @property
    def degree(self) -> int:
        return int(self.multiplicity.sum()) + self.origin_order

    @property
    def sign(self) -> int:
        return 1 if self.origin_order == 0 else -1

    def evaluate(self, z):
        """F(z)."""
        z = np.asarray(z)
        if self.structure is not None:
            nu, kind = self.structure
            if not np.iscomplexobj(z) and np.all(z >= 0):
                r = np.sqrt(z)
            else:
                r = np.sqrt(z.astype(complex))
            if kind == "A":
                val = specfun.eval_a(nu, r) ** 2
            else:
                val = 4.0 * (nu + 1.0) ** 2 * specfun.eval_b(nu, r) ** 2
            return np.real(val) if not np.iscomplexobj(z) else val
        out = z ** self.origin_order * np.ones_like(z, dtype=np.result_type(z, float))
        for xi, p in zip(self.zeros, self.multiplicity):
            out = out * (1.0 - z / xi) ** p
        return out


def _structure_terms(profile: LaguerrePolyaProfile):
    # residues of 1/F for the exact infinite products
    nu, kind = profile.structure
    root = np.sqrt(profile.zeros)
    zeta = profile.zeros
    if kind == "A":
        b2 = specfun.eval_b(nu, root) ** 2
        alpha = -4.0 * zeta / b2
        beta = -4.0 * (nu + 1.0) / b2
        c0 = 0.0
    else:
        a2 = specfun.eval_a(nu, root) ** 2
        alpha = -zeta / ((nu + 1.0) ** 2 * a2)
        beta = -1.0 / ((nu + 1.0) * a2)
        c0 = -1.0
    return alpha, beta, c0


def _finite_terms(profile: LaguerrePolyaProfile):
    zeta = profile.zeros
    mult = profile.multiplicity
    k = profile.origin_order
    alpha = np.zeros_like(zeta)
    beta = np.zeros_like(zeta)
    for j, (zj, pj) in enumerate(zip(zeta, mult)):
        others = np.arange(len(zeta)) != j
        log_q = -k * math.log(zj) - np.sum(mult[others] * np.log(np.abs(1.0 - zj / zeta[others])))
        sign_q = np.prod(np.sign(1.0 - zj / zeta[others]) ** mult[others])
        q = sign_q * math.exp(log_q)
        if pj == 1:
            beta[j] = zj * q
        else:
            dlog = -k / zj + np.sum(mult[others] / (zeta[others] - zj))
            alpha[j] = -zj * zj * q
            beta[j] = -zj * zj * q * dlog
    return alpha, beta, (-1.0 if k == 1 else 0.0)


@dataclass(frozen=True)
class FrequencyFunction:
    """Frequency function g of 1/F on the strip just left of the imaginary axis.

    ``method`` selects the evaluation route: ``partial_fraction`` (residue
    form, exact for finite profiles and for the structure profiles) or
    ``contour`` (numerical inversion along Re s = -xi_1/2).
    """

    profile: LaguerrePolyaProfile
    method: str = "partial_fraction"
    sign: int = field(init=False)

    def __post_init__(self):
        if self.method not in ("partial_fraction", "contour"):
            raise DomainError(f"unknown method {self.method!r}")
        if self.profile.degree < 2:
            raise DomainError("frequency function needs at least two zeros counted with multiplicity")
        object.__setattr__(self, "sign", self.profile.sign)

    @cached_property
    def terms(self):
        """(zeta, alpha, beta, c0) of the exponential-polynomial form."""
        if self.profile.structure is not None:
            alpha, beta, c0 = _structure_terms(self.profile)
        else:
            alpha, beta, c0 = _finite_terms(self.profile)
        return self.profile.zeros, alpha, beta, c0

    @property
    def flat_edge(self) -> float:
        """Left edge of the interval (t0, 0) on which g is numerically zero.

        Only the structure profiles vanish to infinite order at 0-; for a
        finite profile this is 0.
        """
        if self.profile.structure is None:
            return 0.0
        return -50.0 / float(self.profile.zeros[-1])

    def derivative(self, t, order: int = 0):
        """g^{(order)}(t) from the exponential-polynomial form."""
        t = np.asarray(t, dtype=float)
        flat = np.ravel(t)
        zeta, alpha, beta, c0 = self.terms
        out = np.zeros(flat.shape)
        if self.profile.structure is not None:
            live = flat < self.flat_edge
        elif self.profile.origin_order == 1:
            live = flat <= 0
        else:
            live = flat < 0
        if np.any(live):
            tt = flat[live][:, None]
            e = np.exp(zeta * tt)
            k = order
            poly = alpha * zeta ** k * tt + k * alpha * zeta ** (k - 1) + beta * zeta ** k
            parts = e * poly
            val = parts.sum(axis=1) + (c0 if k == 0 else 0.0)
            scale = np.abs(parts).sum(axis=1) + (abs(c0) if k == 0 else 0.0)
            if self.profile.structure is not None:
                # values within rounding of zero are the flat part of g
                val = np.where(np.abs(val) <= 64 * _EPS * scale, 0.0, val)
            out[live] = val
        return out.reshape(t.shape) if t.ndim else float(out[0])

    def _contour(self, t: float) -> float:
        if t > 0:
            return 0.0
        c = -0.5 * float(self.profile.zeros[0])
        F = self.profile.evaluate

        def inv(y):
            return 1.0 / F(np.complex128(c + 1j * y))

        opts = dict(limit=400, epsabs=1e-13, epsrel=1e-12)
        if t == 0:
            val, _ = integrate.quad(lambda y: inv(y).real, 0, np.inf, **opts)
        else:
            w = abs(t)
            vc, _ = integrate.quad(lambda y: inv(y).real, 0, np.inf, weight="cos", wvar=w, limlst=200)
            vs, _ = integrate.quad(lambda y: inv(y).imag, 0, np.inf, weight="sin", wvar=w, limlst=200)
            val = vc - math.copysign(1.0, t) * vs
        return math.exp(c * t) * val / math.pi

    def __call__(self, t):
        if self.method == "contour":
            t = np.asarray(t, dtype=float)
            out = np.array([self._contour(float(v)) for v in np.ravel(t)])
            return out.reshape(t.shape) if t.ndim else float(out[0])
        return self.derivative(t, 0)

    def laplace_left(self, z, shift: float):
        """int_{-inf}^{0} g(w - shift) e^{-z w} dw in closed form (Re z < 0)."""
        z = np.asarray(z, dtype=complex)
        zeta, alpha, beta, c0 = self.terms
        d = zeta[None, :] - np.ravel(z)[:, None]
        e = np.exp(-zeta * shift)
        val = (e * ((beta - alpha * shift) / d - alpha / d ** 2)).sum(axis=1)
        if c0:
            val = val - c0 / np.ravel(z)
        return val.reshape(z.shape)


def freq_eval(f: FrequencyFunction, t):
    """g(t) for the frequency function ``f``; zero for t > 0."""
    return f(t)


class _WIntegral:
    """w-integral int_0^lam g(w - lam) e^{-z w} dw for one (g, lam) pair."""

    def __init__(self, freq: FrequencyFunction, lam: float, n: int = 24):
        if not (lam > 0 and math.isfinite(lam)):
            raise DomainError("lambda must be positive and finite")
        self.freq = freq
        self.lam = float(lam)
        self.n = n
        self._rules: dict[tuple[int, int], tuple[np.ndarray, np.ndarray]] = {}
        self._watson = None

    def _rule(self, left: int, inner: int):
        key = (left, inner)
        if key not in self._rules:
            breaks = graded_breaks(0.0, self.lam, left=left, right=8, inner=inner)
            w, wt = panel_rule(breaks, self.n)
            gw = wt * self.freq(w - self.lam)
            self._rules[key] = (w, gw)
        return self._rules[key]

    def watson_coefficients(self):
        if self._watson is None:
            self._watson = np.array([self.freq.derivative(-self.lam, k) for k in range(WATSON_TERMS)])
        return self._watson

    def direct(self, z: np.ndarray) -> np.ndarray:
        out = np.empty(z.shape, dtype=complex)
        if z.size == 0:
            return out
        big = float(np.max(np.abs(z))) * self.lam
        left = int(min(60, max(2, math.ceil(math.log2(max(big, 1.0))) + 2)))
        osc = float(np.max(np.abs(z.imag))) * self.lam
        inner = int(max(1, math.ceil(osc / 8.0)))
        w, gw = self._rule(left, inner)
        real = not np.any(z.imag)
        for s in range(0, z.size, 256):
            zz = z[s:s + 256].real if real else z[s:s + 256]
            out[s:s + 256] = np.exp(-np.outer(zz, w)) @ gw
        return out

    def watson(self, z: np.ndarray) -> np.ndarray:
        coef = self.watson_coefficients()
        inv = 1.0 / z
        out = np.zeros(z.shape, dtype=complex)
        power = inv.copy()
        for c in coef:
            out = out + c * power
            power = power * inv
        return out

    def __call__(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        flat = np.ravel(z)
        use_w = flat.real * self.lam >= WATSON_THRESHOLD
        out = np.empty(flat.shape, dtype=complex)
        if np.any(use_w):
            out[use_w] = self.watson(flat[use_w])
        if np.any(~use_w):
            out[~use_w] = self.direct(flat[~use_w])
        return out.reshape(z.shape)


class InterpolationTransform:
    """The entire function z -> T(F, lam, z) for a fixed profile and lam."""

    def __init__(self, profile: LaguerrePolyaProfile, lambda_prime: float,
                 method: str = "partial_fraction"):
        if not (lambda_prime > 0):
            raise DomainError("lambda_prime must be positive")
        self.profile = profile
        self.lambda_prime = float(lambda_prime)
        self.freq = FrequencyFunction(profile, method)
        self.w_integral = _WIntegral(self.freq, self.lambda_prime)

    def split(self, z):
        """(H, I) with T(z) - H(z) e^{-lam z} = F(z) I(z).

        H is 1 on Re z >= -1/4, where I is minus the finite w-integral,
        and 0 to the left, where I is the closed-form left Laplace integral.
        """
        z = np.asarray(z, dtype=complex)
        left = z.real < -0.25
        h = np.where(left, 0.0, 1.0)
        i_val = np.empty(z.shape, dtype=complex)
        if np.any(left):
            i_val[left] = self.freq.laplace_left(z[left], self.lambda_prime)
        if np.any(~left):
            i_val[~left] = -self.w_integral(z[~left])
        return h, i_val

    def __call__(self, z):
        z_arr = np.asarray(z)
        zc = z_arr.astype(complex)
        h, i_val = self.split(zc)
        with np.errstate(over="ignore", invalid="ignore"):
            # the exponential only enters where h = 1; it overflows far left
            expo = np.where(h != 0, np.exp(-self.lambda_prime * np.where(h != 0, zc, 0)), 0)
            val = expo + self.profile.evaluate(zc) * i_val
        if not np.all(np.isfinite(val)):
            raise NumericalError("interpolation transform overflowed", z=str(z))
        if not np.iscomplexobj(z_arr):
            val = val.real
        return val if z_arr.ndim else val[()]


def interp_transform(profile: LaguerrePolyaProfile, lambda_prime: float, z):
    """T(F, lambda_prime, z) for the given profile."""
    return InterpolationTransform(profile, lambda_prime)(z)


class ExtremalEvaluator:
    """Optimal minorant (side "minorant") or majorant of e^{-pi lam x^2}.

    The minorant is T(F_A, pi lam, x^2) with F_A(z) = A_nu(sqrt z)^2 and the
    majorant is T(F_B, pi lam, x^2) with F_B(z) = 4(nu+1)^2 B_nu(sqrt z)^2.
    Both have exponential type 2.
    """

    def __init__(self, p, lam: float, side: str, m: int = DEFAULT_TRUNCATION):
        self.p = specfun._as_param(p)
        if not (lam > 0 and math.isfinite(lam)):
            raise DomainError("lambda must be positive and finite")
        side = _normalise_side(side)
        self.lam = float(lam)
        self.side = side
        kind = "A" if side == "minorant" else "B"
        self.squared_profile = LaguerrePolyaProfile.squared_structure(self.p, kind, m)
        self.transform = InterpolationTransform(self.squared_profile, math.pi * self.lam)

    @property
    def nodes(self) -> np.ndarray:
        """Positive interpolation nodes (zeros of A_nu or B_nu); 0 is also a node for the majorant."""
        return np.sqrt(self.squared_profile.zeros)

    def target(self, x):
        x = np.asarray(x, dtype=float)
        return np.exp(-math.pi * self.lam * x * x)

    def gap(self, x):
        """|target - extremal| >= 0, computed without cancellation."""
        x = np.asarray(x, dtype=float)
        s = x * x
        j = self.transform.w_integral(s).real
        f = self.squared_profile.evaluate(s)
        val = f * j if self.side == "minorant" else -f * j
        return val

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        g = self.gap(x)
        t = self.target(x)
        val = t - g if self.side == "minorant" else t + g
        return val if val.ndim else float(val)

    def complex_eval(self, z):
        z = np.asarray(z, dtype=complex)
        return self.transform(z * z)


def _normalise_side(side: str) -> str:
    s = str(side).lower()
    if s in ("minorant", "minus", "-", "lower"):
        return "minorant"
    if s in ("majorant", "plus", "+", "upper"):
        return "majorant"
    raise DomainError(f"side must be minus/minorant or plus/majorant, got {side!r}")


def minorant_eval(p, lam: float, x, m: int = DEFAULT_TRUNCATION):
    """L(A_nu^2, lam, x), the optimal minorant of e^{-pi lam x^2} of type 2."""
    return ExtremalEvaluator(p, lam, "minorant", m)(x)


def majorant_eval(p, lam: float, x, m: int = DEFAULT_TRUNCATION):
    """M(B_nu^2, lam, x), the optimal majorant of e^{-pi lam x^2} of type 2."""
    return ExtremalEvaluator(p, lam, "majorant", m)(x)


def truncation_certificate(p, lam: float, side: str, m: int = DEFAULT_TRUNCATION,
                           probes=(0.3, 1.1, 2.7, 5.3, 9.1)) -> float:
    """Largest relative change of the extremal at the probes when m doubles."""
    a = ExtremalEvaluator(p, lam, side, m)
    b = ExtremalEvaluator(p, lam, side, 2 * m)
    x = np.asarray(probes, dtype=float)
    va, vb = a(x), b(x)
    return float(np.max(np.abs(va - vb) / np.maximum(np.abs(vb), 1e-300)))


def require_certificate(p, lam, side, m=DEFAULT_TRUNCATION, tol=1e-9):
    change = truncation_certificate(p, lam, side, m)
    if change >= tol:
        raise ConvergenceError("zero truncation not certified", relative_change=change, m=m)
    return change
