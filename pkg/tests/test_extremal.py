import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from gaussextremal.errors import ConvergenceError, DomainError
from gaussextremal.extremal import (QuadratureSpec, gaussian_weighted_norm, l1_error_quadrature, multi_eval,
                                    sphere_factor, value_one_dim, value_scaled)
from gaussextremal.lpinterp import ExtremalEvaluator


def test_weighted_norm():
    assert gaussian_weighted_norm(-0.5, 1.0) == pytest.approx(1.0)
    assert gaussian_weighted_norm(0.0, 2.0) == pytest.approx(1 / (2 * math.pi))


def test_sphere_factor():
    assert sphere_factor(1) == pytest.approx(1.0)
    assert sphere_factor(2) == pytest.approx(math.pi)
    assert sphere_factor(3) == pytest.approx(2 * math.pi)
    with pytest.raises(DomainError):
        sphere_factor(0)


def test_half_order_values_closed_form():
    # at nu = -1/2: U^+ = 2 sum_{k in Z} e^{-pi lam (pi k)^2} pi ... reduces to theta sums
    lam = 1.0
    k = np.arange(-40, 41)
    plus = math.pi * math.fsum(np.exp(-math.pi * lam * (math.pi * k) ** 2)) - 1.0
    minus = 1.0 - math.pi * math.fsum(np.exp(-math.pi * lam * (math.pi * (k + 0.5)) ** 2))
    assert value_one_dim(-0.5, lam, "plus").value == pytest.approx(plus, rel=1e-13)
    assert value_one_dim(-0.5, lam, "minus").value == pytest.approx(minus, rel=1e-12)


@pytest.mark.parametrize("nu", [-0.8, 0.0, 0.5])
@pytest.mark.parametrize("side", ["minus", "plus"])
def test_closed_form_matches_quadrature(nu, side):
    v = value_one_dim(nu, 1.0, side)
    q = l1_error_quadrature(nu, 1.0, side)
    assert q.value == pytest.approx(v.value, rel=1e-8)
    assert q.min_integrand >= 0
    assert v.tail_bound < 1e-12


def test_tanh_sinh_scheme_agrees():
    v = value_one_dim(0.0, 0.5, "minus").value
    q = l1_error_quadrature(0.0, 0.5, "minus", QuadratureSpec(scheme="tanh_sinh", rel_tol=1e-6))
    assert q.value == pytest.approx(v, rel=1e-6)


def test_quadrature_tolerance_failure_raises():
    with pytest.raises(ConvergenceError):
        l1_error_quadrature(0.0, 1.0, "minus", QuadratureSpec(rel_tol=1e-15))


def test_quadrature_spec_validation():
    with pytest.raises(DomainError):
        QuadratureSpec(scheme="simpson")
    with pytest.raises(DomainError):
        QuadratureSpec(rel_tol=0.1)


@given(st.floats(-0.9, 3.0), st.floats(0.05, 20.0))
def test_values_nonnegative_and_ordered(nu, lam):
    lo = value_one_dim(nu, lam, "minus").value
    hi = value_one_dim(nu, lam, "plus").value
    assert lo >= 0 and hi >= 0


@given(st.floats(-0.9, 2.0), st.floats(0.2, 5.0), st.sampled_from([0.5, 1.0, 3.0]), st.integers(1, 4))
def test_scaling_law(nu, lam, delta, dim):
    kappa = 2.0 / delta
    a = value_scaled(nu, delta, lam, dim, "minus").value
    b = value_one_dim(nu, kappa ** 2 * lam, "minus").value
    assert a == pytest.approx(kappa ** (2 * nu + 2) * sphere_factor(dim) * b, rel=1e-12)


def test_large_lambda_decay():
    for lam in (10.0, 100.0, 1000.0):
        assert value_one_dim(0.0, lam, "minus").value * lam == pytest.approx(1 / math.pi, rel=0.1)


@pytest.mark.parametrize("side", ["minus", "plus"])
def test_small_lambda_decay(side):
    ratios = [value_one_dim(0.0, lam, side).value / lam ** 3 for lam in (1e-1, 1e-2, 1e-3)]
    assert all(math.isfinite(r) for r in ratios)
    assert ratios[0] >= ratios[1] >= ratios[2]


def test_multi_eval_radial():
    p = np.array([[0.3, 0.4], [0.0, 0.5], [1.0, 2.0]])
    vals = multi_eval(0.0, 2, 2.0, 1.0, p, "minus")
    ev = ExtremalEvaluator(0.0, 1.0, "minus")
    np.testing.assert_allclose(vals, ev(np.linalg.norm(p, axis=1)), rtol=1e-13)
    assert vals[0] == pytest.approx(vals[1])


def test_multi_eval_dilation():
    # type delta extremal at x equals type 2 extremal for kappa^2 lam at x/kappa
    v = multi_eval(-0.5, 1, 1.0, 0.5, np.array([[0.7]]), "plus")
    ev = ExtremalEvaluator(-0.5, 4 * 0.5, "plus")
    assert v[0] == pytest.approx(ev(0.35))


def test_domain_errors():
    with pytest.raises(DomainError):
        value_one_dim(0.0, 0.0, "minus")
    with pytest.raises(DomainError):
        value_scaled(0.0, -1.0, 1.0, 1, "minus")
    with pytest.raises(DomainError):
        multi_eval(0.0, 2, 2.0, 1.0, np.zeros((3, 3)), "minus")
