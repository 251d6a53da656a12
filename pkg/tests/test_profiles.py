import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from symvar_lab.errors import DomainError, InputError, NumericError
from symvar_lab.profiles import (
    ClosedFormProfile,
    GridProfile,
    ReflectedProfile,
    ShiftedSinh,
)


def test_closed_form_derivatives():
    p = ClosedFormProfile.from_expr("sin(t)", (0.0, 3.0))
    t = np.linspace(0.1, 2.9, 7)
    for k, ref in enumerate((np.sin, np.cos, lambda x: -np.sin(x), lambda x: -np.cos(x), np.sin)):
        np.testing.assert_allclose(p.deriv(t, k), ref(t), atol=1e-15)
    with pytest.raises(NumericError):
        p.deriv(1.0, 5)


def test_constant_expression_broadcasts():
    p = ClosedFormProfile.from_expr("2 + 0*t", (0.0, 1.0))
    assert p(np.zeros(4)).shape == (4,)
    assert p.deriv(0.5, 1) == 0.0


def test_domain_checks():
    p = ClosedFormProfile.from_expr("t", (0.0, 1.0))
    with pytest.raises(DomainError):
        p(1.5)
    with pytest.raises(InputError):
        ClosedFormProfile.from_expr("t", (1.0, 1.0))


def test_grid_profile_validation():
    with pytest.raises(InputError):
        GridProfile([0, 1, 2, 3], [0, 1, 2, 3])
    with pytest.raises(InputError):
        GridProfile([0, 1, 2, 4, 5], np.zeros(5))
    with pytest.raises(InputError):
        GridProfile([0, 2, 1, 3, 4], np.zeros(5))


def test_grid_stencils_match_analytic_to_stencil_order():
    def errors(n):
        g = np.linspace(0.0, 2.0, n)
        p = GridProfile(g, np.exp(g))
        t = g[5:-5:3]
        return [np.max(np.abs(p.deriv(t, k) - np.exp(t))) for k in (0, 1, 2)]
    coarse, fine = errors(81), errors(161)
    orders = [np.log2(c / f) for c, f in zip(coarse, fine)]
    assert orders[1] >= 3.5 and orders[2] >= 3.5


def test_grid_reproduces_quartics_exactly():
    g = np.linspace(-1.0, 1.0, 21)
    poly = np.polynomial.Polynomial([0.3, -1.0, 0.5, 2.0, -0.7])
    p = GridProfile(g, poly(g))
    t = np.linspace(-0.97, 0.97, 31)
    for k in range(5):
        np.testing.assert_allclose(p.deriv(t, k), poly.deriv(k)(t), atol=1e-9)


@given(st.floats(0.0, 2.0), st.integers(0, 4))
def test_reflected_profile_parity(t, k):
    base = ClosedFormProfile.from_expr("cosh(t) + t**3", (0.0, 2.0))
    r = ReflectedProfile(base)
    assert r.deriv(-t, k) == pytest.approx((-1) ** k * r.deriv(t, k), rel=1e-15, abs=1e-15)
    assert r.deriv(t, k) == pytest.approx(base.deriv(t, k), rel=1e-15)


def test_reflection_needs_origin():
    with pytest.raises(InputError):
        ReflectedProfile(ClosedFormProfile.from_expr("t", (0.5, 1.0)))


def test_shifted_sinh():
    p = ShiftedSinh(0.25, (0.0, 1.0))
    assert p(0.5) == pytest.approx(np.sinh(0.75))
    assert p.deriv(0.5, 3) == pytest.approx(np.cosh(0.75))
