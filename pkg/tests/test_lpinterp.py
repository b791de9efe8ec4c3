import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate

from gaussextremal.errors import DomainError
from gaussextremal.lpinterp import (ExtremalEvaluator, FrequencyFunction, InterpolationTransform,
                                    LaguerrePolyaProfile, freq_eval, interp_transform, majorant_eval,
                                    minorant_eval, truncation_certificate)


def test_profile_validation():
    with pytest.raises(DomainError):
        LaguerrePolyaProfile.finite([-1.0, 2.0])
    with pytest.raises(DomainError):
        LaguerrePolyaProfile.finite([1.0, 1.0, 1.0])
    prof = LaguerrePolyaProfile.finite([1.0, 1.0, 3.0])
    assert prof.degree == 3 and list(prof.multiplicity) == [2, 1]


def test_degree_below_two_rejected():
    with pytest.raises(DomainError):
        FrequencyFunction(LaguerrePolyaProfile.finite([2.0]))


@pytest.mark.parametrize("zeros,origin", [([1.0, 3.0], 0), ([0.5, 2.0, 5.0], 0), ([1.5], 1), ([1.0, 1.0, 4.0], 0)])
def test_frequency_function_inverts_laplace(zeros, origin):
    prof = LaguerrePolyaProfile.finite(zeros, origin_order=origin)
    g = FrequencyFunction(prof)
    z = -0.6
    # 1/F(z) = int g(t) e^{-z t} dt on the strip left of the imaginary axis
    val, _ = integrate.quad(lambda t: g(t) * math.exp(-z * t), -np.inf, 0, limit=200)
    assert val == pytest.approx(1.0 / prof.evaluate(z), rel=1e-9)


def test_contour_matches_partial_fractions():
    prof = LaguerrePolyaProfile.finite([1.0, 2.5, 4.0])
    t = np.array([-0.2, -1.0, -3.0])
    pf = FrequencyFunction(prof)(t)
    ct = FrequencyFunction(prof, "contour")(t)
    np.testing.assert_allclose(ct, pf, rtol=1e-7, atol=1e-10)


def test_structure_frequency_function_sign_and_flat_zone():
    prof = LaguerrePolyaProfile.squared_structure(0.0, "A", 64)
    g = FrequencyFunction(prof)
    t = np.linspace(-8.0, -0.5, 40)
    assert np.all(g(t) >= 0)
    assert g(0.5) == 0.0
    assert freq_eval(g, g.flat_edge / 2) == 0.0


def test_structure_contour_agrees():
    prof = LaguerrePolyaProfile.squared_structure(-0.5, "A", 64)
    t = np.array([-0.5, -1.5])
    np.testing.assert_allclose(FrequencyFunction(prof, "contour")(t), FrequencyFunction(prof)(t), rtol=1e-6)


@given(st.floats(0.2, 3.0))
def test_finite_interpolation_at_zeros(lam):
    prof = LaguerrePolyaProfile.finite([0.7, 0.7, 2.0, 2.0, 5.0, 5.0])
    tr = InterpolationTransform(prof, lam)
    xi = prof.zeros
    np.testing.assert_allclose(tr(xi), np.exp(-lam * xi), rtol=1e-10, atol=1e-14)
    h = 1e-5
    slope = (tr(xi + h) - tr(xi - h)) / (2 * h)
    np.testing.assert_allclose(slope, -lam * np.exp(-lam * xi), rtol=1e-5, atol=1e-8)


def test_finite_one_sided():
    prof = LaguerrePolyaProfile.finite([1.0, 1.0, 3.0, 3.0])
    x = np.linspace(-2, 8, 500)
    diff = np.exp(-0.8 * x) - interp_transform(prof, 0.8, x)
    assert diff.min() >= -1e-12


def test_transform_entire_across_seam():
    prof = LaguerrePolyaProfile.squared_structure(0.0, "A", 32)
    tr = InterpolationTransform(prof, math.pi)
    left, right = tr(np.array([-0.25 - 1e-9 + 0.3j])), tr(np.array([-0.25 + 1e-9 + 0.3j]))
    assert abs(left[0] - right[0]) < 1e-7


def test_watson_and_direct_agree_near_threshold():
    ev = ExtremalEvaluator(0.0, 1.0, "minus")
    w = ev.transform.w_integral
    s = np.array([180.0, 220.0, 260.0]) / w.lam if hasattr(w, "lam") else np.array([60.0, 70.0, 80.0])
    np.testing.assert_allclose(w.watson(s), w.direct(s), rtol=1e-9)


@pytest.mark.parametrize("nu", [-0.5, 0.0, 0.5])
@pytest.mark.parametrize("side", ["minus", "plus"])
def test_extremal_properties(nu, side):
    ev = ExtremalEvaluator(nu, 1.0, side)
    x = np.linspace(0, 25, 4000)
    assert ev.gap(x).min() >= 0
    nodes = ev.nodes[:20]
    np.testing.assert_allclose(ev(nodes), np.exp(-math.pi * nodes ** 2), atol=1e-12)
    if side == "plus":
        assert ev(0.0) == pytest.approx(1.0, abs=1e-12)


def test_half_order_majorant_closed_form():
    # for nu = -1/2 the extremal is the classical one of type 2 pi in these units
    x = np.linspace(0, 6, 13)
    m = majorant_eval(-0.5, 1.0, x)
    n = minorant_eval(-0.5, 1.0, x)
    assert np.all(n <= np.exp(-math.pi * x ** 2) + 1e-15)
    assert np.all(m >= np.exp(-math.pi * x ** 2) - 1e-15)


def test_even_and_real():
    ev = ExtremalEvaluator(0.3, 0.7, "plus")
    z = np.array([0.4 + 0.9j, 2.0 - 1.0j])
    np.testing.assert_allclose(ev.complex_eval(z), ev.complex_eval(-z), rtol=1e-10)
    np.testing.assert_allclose(ev.complex_eval(np.conj(z)), np.conj(ev.complex_eval(z)), rtol=1e-10)


def test_exponential_type_growth():
    # |M(iy)| e^{-2|y|} stays bounded for type 2
    ev = ExtremalEvaluator(0.0, 1.0, "minus")
    y = np.array([5.0, 10.0, 20.0, 30.0])
    growth = np.abs(ev.complex_eval(1j * y)) * np.exp(-2 * y)
    assert np.all(np.isfinite(growth)) and growth.max() < 10 * growth[0] + 1.0


def test_truncation_certificate_small():
    assert truncation_certificate(0.0, 1.0, "minus") < 1e-9
    assert truncation_certificate(0.5, 0.5, "plus") < 1e-9


def test_bad_side():
    with pytest.raises(DomainError):
        ExtremalEvaluator(0.0, 1.0, "sideways")
    with pytest.raises(DomainError):
        ExtremalEvaluator(0.0, -1.0, "minus")
