"""Structure functions of the homogeneous de Branges spaces.

For an index nu > -1 the even and odd structure functions are

    A_nu(z) = Gamma(nu+1) (z/2)^(-nu)   J_nu(z)
    B_nu(z) = Gamma(nu+1) (z/2)^(-nu)   J_{nu+1}(z)

so that A_{-1/2} = cos and B_{-1/2} = sin.  Both are real entire functions,
A_nu is even with A_nu(0) = 1 and B_nu is odd with B_nu'(0) = 1/(2(nu+1)).
They satisfy A' = -B and B' = A - (2nu+1) B / z.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .errors import ConvergenceError, DomainError, RangeError

# Power series is used for |z| <= SERIES_RADIUS; beyond that the Bessel
# routines of scipy take over.  At radius 4 both agree to ~1e-15.
SERIES_RADIUS = 4.0
# e^{|Im z|} overflows double precision slightly above 709.
IMAG_LIMIT = 700.0


@dataclass(frozen=True)
class HomogeneousParameter:
    """Index nu of the homogeneous space and its derived constants."""

    nu: float
    c_nu: float = field(init=False)
    big_n_nu: int = field(init=False)

    def __post_init__(self):
        nu = float(self.nu)
        if not math.isfinite(nu) or nu <= -1.0:
            raise DomainError(f"nu must be a finite real > -1, got {self.nu!r}")
        object.__setattr__(self, "nu", nu)
        c = math.exp(math.log(math.pi) - (2 * nu + 1) * math.log(2.0) - 2 * math.lgamma(nu + 1))
        object.__setattr__(self, "c_nu", c)
        object.__setattr__(self, "big_n_nu", int(math.ceil(2 * nu + 2 - 1e-12)))

    @property
    def gamma1(self) -> float:
        return math.gamma(self.nu + 1)


def _as_param(p) -> HomogeneousParameter:
    return p if isinstance(p, HomogeneousParameter) else HomogeneousParameter(p)


def _series(nu: float, z: np.ndarray, odd: bool) -> np.ndarray:
    # term recurrence for the normalised series; z is complex
    q = -(z * 0.5) ** 2
    if odd:
        term = z * 0.5 / (nu + 1.0)
        shift = nu + 1.0
    else:
        term = np.ones_like(z)
        shift = nu
    total = term.copy()
    for n in range(1, 200):
        term = term * q / (n * (n + shift))
        total = total + term
        if np.all(np.abs(term) <= 1e-18 * np.maximum(np.abs(total), 1e-300)):
            break
    return total


def _bessel_branch(nu: float, z: np.ndarray, odd: bool) -> np.ndarray:
    # z has Re z >= 0 here, so the principal power is the right branch
    order = nu + 1.0 if odd else nu
    with np.errstate(over="ignore", invalid="ignore"):
        j = special.jv(order, z)
        return special.gamma(nu + 1.0) * (0.5 * z) ** (-nu) * j


def _evaluate(p, z, odd: bool):
    p = _as_param(p)
    z_in = np.asarray(z)
    real_input = not np.iscomplexobj(z_in)
    zc = np.atleast_1d(z_in).astype(complex)
    if not np.all(np.isfinite(zc)):
        raise DomainError("argument must be finite")
    if np.any(np.abs(zc.imag) > IMAG_LIMIT):
        raise RangeError("|Im z| too large: structure function overflows double precision")
    # fold into the right half-plane; parity is then exact by construction
    flip = (zc.real < 0) | ((zc.real == 0) & (zc.imag < 0))
    w = np.where(flip, -zc, zc)
    out = np.empty_like(w)
    small = np.abs(w) <= SERIES_RADIUS
    if np.any(small):
        out[small] = _series(p.nu, w[small], odd)
    if np.any(~small):
        out[~small] = _bessel_branch(p.nu, w[~small], odd)
    if not np.all(np.isfinite(out)):
        raise RangeError("structure function not representable in double precision")
    if odd:
        out = np.where(flip, -out, out)
    if real_input:
        out = out.real
    return out.reshape(z_in.shape) if z_in.ndim else out[0]


def eval_a(p, z):
    """A_nu(z); real for real input, exactly even in z."""
    return _evaluate(p, z, odd=False)


def eval_b(p, z):
    """B_nu(z); real for real input, exactly odd in z."""
    return _evaluate(p, z, odd=True)


def eval_e(p, z):
    """E_nu(z) = A_nu(z) - i B_nu(z)."""
    return eval_a(p, z) - 1j * eval_b(p, z)


def eval_a_prime(p, z):
    return -eval_b(p, z)


def eval_b_prime(p, z):
    """B_nu'(z) = A_nu(z) - (2nu+1) B_nu(z)/z, with the limit 1/(2(nu+1)) at 0."""
    p = _as_param(p)
    z_arr = np.asarray(z)
    a = np.asarray(eval_a(p, z_arr))
    b = np.asarray(eval_b(p, z_arr))
    with np.errstate(divide="ignore", invalid="ignore"):
        val = a - (2 * p.nu + 1) * b / z_arr
    val = np.where(z_arr == 0, 1.0 / (2 * (p.nu + 1)), val)
    return val if val.ndim else val[()]


def kernel_diag(p, xi):
    """Reproducing kernel on the diagonal, K_nu(xi, xi) for real xi.

    Uses (A^2 + B^2 - (2nu+1) A B / xi) / pi, with the limit
    1/(2 pi (nu+1)) at the origin.
    """
    p = _as_param(p)
    x = np.abs(np.asarray(xi, dtype=float))
    a = np.asarray(eval_a(p, x))
    b = np.asarray(eval_b(p, x))
    tiny = x < 1e-8
    with np.errstate(divide="ignore", invalid="ignore"):
        k = (a * a + b * b - (2 * p.nu + 1) * a * b / x) / math.pi
    k = np.where(tiny, 1.0 / (2 * math.pi * (p.nu + 1)), k)
    return k if k.ndim else float(k)


# ---------------------------------------------------------------------------
# zeros


@dataclass(frozen=True)
class ZeroTable:
    """First positive zeros of A_nu (kind "A") or B_nu (kind "B").

    The zero of B_nu at the origin is not stored.
    """

    nu: float
    kind: str
    zeros: np.ndarray

    def __post_init__(self):
        z = np.array(self.zeros, dtype=float)
        z.setflags(write=False)
        object.__setattr__(self, "zeros", z)

    def __len__(self) -> int:
        return len(self.zeros)

    def tail_estimate(self, lam: float) -> float:
        """Bound on the omitted part of the optimal-value zero sum.

        Bounds sum_{j>m} e^{-pi lam xi_j^2} / (c_nu K_nu(xi_j, xi_j)) over
        the positive zeros beyond the table.  Uses 1/(c K) ~ pi xi^{2nu+1},
        zero spacing at least 2.5, and a safety factor 2 on the amplitude.
        Returns inf when the summand is not yet decreasing at the last zero.
        """
        if lam <= 0:
            raise DomainError("lambda must be positive")
        nu = self.nu
        x = float(self.zeros[-1])
        if 2 * math.pi * lam * x * x <= 2 * nu + 1 + 1.0:
            return math.inf
        s = math.pi * lam * x * x
        a = nu + 1.0
        # int_x^inf xi^{2nu+1} e^{-pi lam xi^2} dxi
        integral = special.gammaincc(a, s) * math.exp(math.lgamma(a)) / (2 * (math.pi * lam) ** a)
        head = x ** (2 * nu + 1) * math.exp(-s)
        return 2.0 * math.pi * (integral / 2.5 + head)


def _refine(f, fprime, lo, hi, f_lo, tol_x=4e-16, max_iter=100):
    """Safeguarded Newton on many sign-change brackets at once."""
    lo, hi, f_lo = lo.copy(), hi.copy(), f_lo.copy()
    x = 0.5 * (lo + hi)
    active = np.ones(len(x), dtype=bool)
    for _ in range(max_iter):
        if not active.any():
            return x
        xa = x[active]
        fx = f(xa)
        d = fprime(xa)
        same = np.signbit(fx) == np.signbit(f_lo[active])
        lo_a = np.where(same, xa, lo[active])
        hi_a = np.where(same, hi[active], xa)
        f_lo[active] = np.where(same, fx, f_lo[active])
        lo[active], hi[active] = lo_a, hi_a
        with np.errstate(divide="ignore", invalid="ignore"):
            x_new = xa - fx / d
        bad = ~np.isfinite(x_new) | (x_new <= lo_a) | (x_new >= hi_a)
        x_new = np.where(bad, 0.5 * (lo_a + hi_a), x_new)
        done = (fx == 0) | (np.abs(x_new - xa) <= tol_x * np.maximum(1.0, np.abs(xa)))
        x_new = np.where(fx == 0, xa, x_new)
        x[active] = x_new
        idx = np.nonzero(active)[0]
        active[idx[done]] = False
    bad = np.nonzero(active)[0]
    raise ConvergenceError("zero refinement did not converge", index=int(bad[0]) + 1,
                           bracket=(float(lo[bad[0]]), float(hi[bad[0]])))


class _ZeroCache:
    def __init__(self):
        self._lock = threading.Lock()
        self._tables: dict[tuple[float, str], np.ndarray] = {}

    def get(self, p: HomogeneousParameter, kind: str, count: int) -> np.ndarray:
        key = (p.nu, kind)
        with self._lock:
            have = self._tables.get(key)
        if have is not None and len(have) >= count:
            return have[:count]
        table = _compute_zeros(p, kind, max(count, 64, 2 * (0 if have is None else len(have))))
        with self._lock:
            self._tables[key] = table
        return table[:count]


_CACHE = _ZeroCache()


def _mcmahon(order: float, m: np.ndarray) -> np.ndarray:
    beta = (m + order / 2 - 0.25) * math.pi
    return beta - (4 * order * order - 1) / (8 * beta)


def _compute_zeros(p: HomogeneousParameter, kind: str, count: int) -> np.ndarray:
    nu = p.nu
    order = nu if kind == "A" else nu + 1.0
    if kind == "A":
        f = lambda x: eval_a(p, x)
        fp = lambda x: -eval_b(p, x)
    else:
        f = lambda x: eval_b(p, x)
        fp = lambda x: eval_b_prime(p, x)
    upper = float(_mcmahon(order, np.array([count + 2.0]))[0]) + 4.0
    grid = np.concatenate([np.geomspace(1e-6, 1.0, 60)[:-1], np.arange(1.0, upper, 0.2)])
    vals = f(grid)
    sign_change = np.nonzero(np.signbit(vals[:-1]) != np.signbit(vals[1:]))[0][:count]
    if len(sign_change) < count:
        raise ConvergenceError("zero scan found too few zeros", found=len(sign_change),
                               requested=count)
    return _refine(f, fp, grid[sign_change], grid[sign_change + 1], vals[sign_change])


def zeros(p, kind: str, count: int) -> ZeroTable:
    """First ``count`` positive zeros of A_nu (kind "A") or B_nu (kind "B")."""
    p = _as_param(p)
    kind = str(kind).upper()
    if kind not in ("A", "B"):
        raise DomainError("kind must be 'A' or 'B'")
    if int(count) < 1:
        raise DomainError("count must be >= 1")
    return ZeroTable(p.nu, kind, _CACHE.get(p, kind, int(count)))


def mcmahon_guess(p, kind: str, count: int) -> np.ndarray:
    """Leading McMahon approximations to the first ``count`` zeros."""
    p = _as_param(p)
    order = p.nu if str(kind).upper() == "A" else p.nu + 1.0
    return _mcmahon(order, np.arange(1, int(count) + 1, dtype=float))
