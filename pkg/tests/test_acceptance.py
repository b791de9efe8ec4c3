"""Acceptance criteria, one test per criterion, each printing a PASS/FAIL line."""

import itertools
import math
import time

import numpy as np
import pytest

from gaussextremal.extremal import l1_error_quadrature, value_one_dim, value_scaled
from gaussextremal.hilbert import PointConfiguration, bound_check, extremal_values
from gaussextremal.lpinterp import ExtremalEvaluator
from gaussextremal.periodic import EvenCircleMeasure, gaussian_periodic_extremal, theta3
from gaussextremal.specfun import HomogeneousParameter, kernel_diag, zeros
from gaussextremal.subordination import SubordinationMeasure, gamma_factor, q_kernel, subordinate_value

NUS = (-0.5, 0.0, 0.5)
LAMS = (0.5, 1.0, 2.0)
SIDES = ("minus", "plus")
CASES = list(itertools.product(NUS, LAMS, SIDES))


@pytest.fixture
def report(capsys):
    def emit(number, ok, text):
        with capsys.disabled():
            print(f"\ncriterion {number:2d} [{'PASS' if ok else 'FAIL'}] {text}")
    return emit


def _anchor(side, expected, report, number):
    v = value_one_dim(-0.5, 1.0, side).value
    q = l1_error_quadrature(-0.5, 1.0, side).value
    rel = abs(q - v) / v
    ok = abs(v - expected) <= 1e-6 and rel <= 1e-5
    report(number, ok, f"{side} anchor: value={v:.10f} expected={expected} |diff|={abs(v - expected):.2e} "
                       f"quadrature={q:.10f} rel={rel:.2e}")
    return ok


def test_anchor_minorant(report):
    assert _anchor("minus", 0.9973023, report, 1)


def test_anchor_majorant(report):
    assert _anchor("plus", 2.1415927, report, 2)


def test_oracle_equivalence_matrix(report):
    start = time.perf_counter()
    worst = 0.0
    for nu, lam, side in CASES:
        v = value_one_dim(nu, lam, side).value
        q = l1_error_quadrature(nu, lam, side).value
        worst = max(worst, abs(q - v) / v)
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-5 and elapsed < 300
    report(3, ok, f"closed form vs quadrature over {len(CASES)} cases: worst rel={worst:.2e}, {elapsed:.1f} s")
    assert ok


def test_one_sidedness(report):
    x = np.linspace(0.0, 25.0, 10_000)
    worst = math.inf
    for nu, lam, side in CASES:
        ev = ExtremalEvaluator(nu, lam, side)
        sign = 1.0 if side == "minus" else -1.0
        worst = min(worst, float(np.min(sign * (ev.target(x) - ev(x)))))
    ok = worst >= -1e-10
    report(4, ok, f"min sign*(target - extremal) on 10^4 points over {len(CASES)} cases: {worst:.2e}")
    assert ok


def test_interpolation_at_nodes(report):
    worst = 0.0
    for nu, lam, side in CASES:
        ev = ExtremalEvaluator(nu, lam, side)
        xi = zeros(nu, "A" if side == "minus" else "B", 20).zeros
        worst = max(worst, float(np.max(np.abs(ev(xi) - np.exp(-math.pi * lam * xi ** 2)))))
    ok = worst < 1e-8
    report(5, ok, f"max |extremal - gaussian| at the first 20 nodes: {worst:.2e}")
    assert ok


def test_kernel_asymptotics(report):
    devs = []
    for nu in (0.0, 0.5):
        p = HomogeneousParameter(nu)
        xi = zeros(p, "A", 50).zeros[-1]
        devs.append(abs(p.c_nu * kernel_diag(p, xi) * xi ** (2 * nu + 1) * math.pi - 1.0))
    ok = max(devs) <= 0.02
    report(6, ok, f"c K(xi,xi) xi^(2nu+1) vs 1/pi at the 50th zero: rel dev {devs[0]:.2e} (nu=0), "
                  f"{devs[1]:.2e} (nu=1/2)")
    assert ok


def test_scaling_laws(report):
    worst = 0.0
    for nu, lam, side in itertools.product(NUS, (0.5, 1.0), SIDES):
        for d1, d2 in itertools.combinations((1.0, 2.0, 4.0), 2):
            r = d2 / d1
            a = value_scaled(nu, d1, lam, 1, side).value
            b = value_scaled(nu, d2, r * r * lam, 1, side).value
            worst = max(worst, abs(a - r ** (2 * nu + 2) * b) / a)
    worst_sub = 0.0
    for m in (SubordinationMeasure.finite_table([0.3, 1.0, 2.5], [1.0, 0.5, 2.0]),
              SubordinationMeasure.finite_table([0.8], [3.0])):
        for side in SIDES:
            a = subordinate_value(0.0, 2, 1.5, m, side).value
            b = subordinate_value(0.0, 2, 3.0, m.dilate(0.25), side).value
            worst_sub = max(worst_sub, abs(a - 4.0 * b) / a)
    ok = worst <= 1e-12 and worst_sub <= 1e-10
    report(7, ok, f"dilation law worst rel {worst:.2e}; subordinated law worst rel {worst_sub:.2e}")
    assert ok


def test_decay(report):
    large = [value_one_dim(0.0, lam, "minus").value * lam for lam in (10.0, 1e2, 1e3)]
    band = max(large) / min(large)
    small = {side: [value_one_dim(0.0, lam, side).value / lam ** 3 for lam in (1e-1, 1e-2, 1e-3)]
             for side in SIDES}
    bounded = all(all(math.isfinite(r) for r in rs) and rs[0] >= rs[1] >= rs[2] for rs in small.values())
    ok = band <= 10 and bounded
    report(8, ok, f"U-*lam band ratio {band:.3f}; U/lam^3 minus {['%.2e' % r for r in small['minus']]} "
                  f"plus {['%.2e' % r for r in small['plus']]}")
    assert ok


def test_subordination_fourier_identity(report):
    t = np.geomspace(0.1, 10.0, 41)
    worst = 0.0
    for dim, sigma in ((1, 1.0), (2, 1.0)):
        q = q_kernel(SubordinationMeasure.power(sigma), dim, t[:, None] * np.eye(dim)[0])
        ref = gamma_factor(dim + sigma) * t ** (-dim - sigma)
        worst = max(worst, float(np.max(np.abs(q / ref - 1))))
    ok = worst <= 1e-8
    report(9, ok, f"Q kernel of the power measure vs closed form: worst rel {worst:.2e}")
    assert ok


def test_hilbert_bounds(report):
    rng = np.random.default_rng(7)
    pts = np.cumsum(1.0 + rng.exponential(0.7, 20))
    cfg = PointConfiguration(pts, 1.0)
    m = SubordinationMeasure.point_mass(1.0)
    rep = bound_check(cfg, m)
    pair = PointConfiguration(np.array([0.0, 1.0]), 1.0)
    q = abs(q_kernel(m, 1, 1.0))
    lo, hi = extremal_values(1, 1.0, m)
    ok = rep.margin_lower >= -1e-9 and rep.margin_upper >= -1e-9 and q <= min(lo, hi)
    ok = ok and abs(bound_check(pair, m).max_offdiag_form - q) < 1e-14
    report(10, ok, f"20 points: margins {rep.margin_lower:.4e}, {rep.margin_upper:.4e}; "
                   f"two points |Q(delta)|={q:.6f} <= min(U+,U-)={min(lo, hi):.6f}")
    assert ok


def test_periodic_anchors(report):
    leb = EvenCircleMeasure.lebesgue()
    lo = gaussian_periodic_extremal(leb, 1, 1.0, "minus")
    hi = gaussian_periodic_extremal(leb, 1, 1.0, "plus")
    t0, th = theta3(0.0, 1.0), theta3(0.5, 1.0)
    checks = [abs(lo.info["integral"] - 0.9999888) <= 1e-6, abs(hi.info["integral"] - 1.0000080) <= 1e-6,
              abs(t0 - 1.0864348) <= 1e-7, abs(th - 0.9135813) <= 1e-7,
              min(lo.info["min_slack"], hi.info["min_slack"]) >= -1e-10]
    ok = all(checks)
    report(11, ok, f"minorant integral {lo.info['integral']:.10f} (expected 0.9999888), majorant "
                   f"{hi.info['integral']:.10f} (expected 1.0000080), theta(0)={t0:.10f} (1.0864348), "
                   f"theta(1/2)={th:.10f} (0.9135813), slack {min(lo.info['min_slack'], hi.info['min_slack']):.1e}")
    assert ok


def test_periodic_value_formula(report):
    dens = EvenCircleMeasure.from_density(lambda x: 1 + 0.4 * np.cos(2 * np.pi * x) + 0.1 * np.cos(6 * np.pi * x))
    worst = 0.0
    cases = [(EvenCircleMeasure.lebesgue(), n) for n in (1, 2, 4)] + [(dens, n) for n in (1, 2, 4)]
    for meas, n in cases:
        for side in SIDES:
            info = gaussian_periodic_extremal(meas, n, 1.0, side).info
            worst = max(worst, abs(info["integral"] - info["value_formula"]))
    ok = worst <= 1e-8
    report(12, ok, f"integral vs node sum h/K_n over {2 * len(cases)} cases: worst {worst:.2e}")
    assert ok
