"""Hilbert-type inequalities for well-spaced points.

For points y_1..y_M in R^N with pairwise distance at least delta and any
admissible measure mu (with 2nu + 2 = N),

    -U^-(2 pi delta, mu) sum |a_j|^2
        <= sum_{j != l} a_j conj(a_l) Q_mu(y_j - y_l)
        <= U^+(2 pi delta, mu) sum |a_j|^2,

where Q_mu is the Fourier transform of the subordinated radial function.
The power measures give discrete Hardy-Littlewood-Sobolev inequalities.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .errors import DomainError, NumericalError
from .extremal import value_scaled
from .specfun import HomogeneousParameter
from .subordination import (SubordinationMeasure, gamma_factor, q_kernel_radial,
                            subordinate_value)


@dataclass(frozen=True)
class PointConfiguration:
    """Points in R^N with pairwise spacing at least ``min_spacing``."""

    points: np.ndarray
    min_spacing: float

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or pts.shape[0] < 1:
            raise DomainError("points must be an (M, N) array with M >= 1")
        if not np.all(np.isfinite(pts)):
            raise DomainError("points must be finite")
        if not self.min_spacing > 0:
            raise DomainError("spacing must be positive")
        d = self._distances(pts)
        if pts.shape[0] > 1:
            off = d[~np.eye(len(pts), dtype=bool)]
            if off.min() < self.min_spacing * (1 - 1e-12):
                raise DomainError(f"points are closer than {self.min_spacing} (minimum {off.min()})")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @staticmethod
    def _distances(pts):
        diff = pts[:, None, :] - pts[None, :, :]
        return np.sqrt((diff ** 2).sum(-1))

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def count(self) -> int:
        return self.points.shape[0]

    def distances(self) -> np.ndarray:
        return self._distances(self.points)

    @classmethod
    def from_csv(cls, path: str, delta: float) -> "PointConfiguration":
        with open(path, newline="") as fh:
            rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
        try:
            data = [[float(c) for c in r] for r in rows]
        except ValueError:
            data = [[float(c) for c in r] for r in rows[1:]]
        return cls(np.asarray(data), delta)


def _param(dim: int) -> HomogeneousParameter:
    return HomogeneousParameter((dim - 2) / 2.0)


def kernel_matrix(cfg: PointConfiguration, m: SubordinationMeasure) -> np.ndarray:
    """Hermitian matrix with zero diagonal and entries Q_mu(y_j - y_l)."""
    d = cfg.distances()
    iu = np.triu_indices(cfg.count, 1)
    mat = np.zeros((cfg.count, cfg.count))
    if len(iu[0]):
        radii, inverse = np.unique(d[iu], return_inverse=True)
        vals = q_kernel_radial(m, cfg.dim, radii)[inverse]
        mat[iu] = vals
        mat = mat + mat.T
    return mat


def offdiag_form(cfg: PointConfiguration, coeffs, m: SubordinationMeasure) -> float:
    """sum_{j != l} a_j conj(a_l) Q_mu(y_j - y_l)."""
    a = np.asarray(coeffs, dtype=complex).ravel()
    if a.size != cfg.count:
        raise DomainError("coefficient count must equal the number of points")
    mat = kernel_matrix(cfg, m)
    return float(np.real(np.conj(a) @ mat @ a))


@dataclass(frozen=True)
class BoundReport:
    lower: float
    upper: float
    min_eig: float
    max_offdiag_form: float
    margin_lower: float
    margin_upper: float
    type_parameter: float

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def extremal_values(dim: int, delta: float, m: SubordinationMeasure):
    """(U^-(2 pi delta, mu), U^+(2 pi delta, mu)) for 2nu + 2 = dim."""
    p = _param(dim)
    tau = 2 * math.pi * delta
    return _one_value(p, dim, tau, m, "minus"), _one_value(p, dim, tau, m, "plus")


def bound_check(cfg: PointConfiguration, m: SubordinationMeasure, side: str = "both") -> BoundReport:
    """Extreme eigenvalues of the kernel matrix against the extremal values.

    ``side`` may be "minus", "plus" or "both"; a side that is not computed
    reports nan for its bound and margin.
    """
    if side not in ("minus", "plus", "both"):
        raise DomainError("side must be minus, plus or both")
    p = _param(cfg.dim)
    tau = 2 * math.pi * cfg.min_spacing
    u_minus = u_plus = math.nan
    if side in ("minus", "both"):
        u_minus = _one_value(p, cfg.dim, tau, m, "minus")
    if side in ("plus", "both"):
        u_plus = _one_value(p, cfg.dim, tau, m, "plus")
    mat = kernel_matrix(cfg, m)
    try:
        eig = linalg.eigvalsh(mat)
    except linalg.LinAlgError as exc:
        raise NumericalError("eigensolver failed", size=cfg.count) from exc
    lo_eig, hi_eig = float(eig[0]), float(eig[-1])
    return BoundReport(-u_minus, u_plus, lo_eig, hi_eig, lo_eig + u_minus, u_plus - hi_eig, tau)


def _one_value(p, dim, tau, m, side):
    if m.atoms is not None:
        lam, w = m.atoms
        return float(sum(wi * value_scaled(p, tau, li, dim, side).value for li, wi in zip(lam, w)))
    return subordinate_value(p, dim, tau, m, side).value


def hls_constants(dim: int, sigma: float, delta: float):
    """Constants (lower, upper) of the discrete Hardy-Littlewood-Sobolev inequality

        lower sum|a|^2 <= sum_{j != l} a_j conj(a_l) |y_j - y_l|^{-N-sigma} <= upper sum|a|^2

    for points with spacing delta.  The lower bound needs sigma > -N and the
    upper bound sigma > 0; an unavailable side is returned as None.
    """
    if dim < 1:
        raise DomainError("dimension must be >= 1")
    if not sigma > -dim:
        raise DomainError(f"sigma must exceed -N = {-dim}")
    m = SubordinationMeasure.power(sigma)
    p = _param(dim)
    tau = 2 * math.pi * delta
    norm = gamma_factor(dim + sigma)
    lower = -subordinate_value(p, dim, tau, m, "minus").value / float(norm)
    upper = subordinate_value(p, dim, tau, m, "plus").value / float(norm) if sigma > 0 else None
    return lower, upper
