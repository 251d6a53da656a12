import numpy as np
import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st
from oracles import T, ricci_eigenvalues, sphere_warped, torus_warped

from symvar_lab.canonical import SchwarzschildProfile, kasner, kasner_ricci
from symvar_lab.errors import DegeneracyError, DomainError, ReflectionError
from symvar_lab.geometry import (
    SymmetricMetric,
    arclength_form,
    curvature_at,
    curvature_oracle,
    double_across_horizon,
)
from symvar_lab.profiles import ClosedFormProfile, GridProfile

expr = ClosedFormProfile.from_expr


def sphere(e, dom):
    return SymmetricMetric.sphere(expr(e, dom))


def test_round_sphere_at_quarter_pi():
    pt = curvature_at(sphere("sin(t)", (0.0, np.pi)), np.pi / 4)
    assert (pt.K12, pt.K13, pt.K23) == pytest.approx((1, 1, 1), abs=1e-12)
    assert pt.s == pytest.approx(6, abs=1e-12)
    assert pt.znorm2 == pytest.approx(0, abs=1e-12)


def test_hyperbolic_space():
    pt = curvature_at(sphere("sinh(t)", (0.0, 3.0)), 1.0)
    assert (pt.K12, pt.K13, pt.K23) == pytest.approx((-1, -1, -1), abs=1e-12)
    assert pt.s == pytest.approx(-6, abs=1e-12)


def test_schwarzschild_ricci_matches_closed_form():
    prof = SchwarzschildProfile(1.0, 50.0)
    metric = SymmetricMetric.sphere(prof)
    r = np.array([2.5, 3.0, 7.0, 20.0])
    t = prof.t_of_r(r)
    pt = curvature_at(metric, t)
    np.testing.assert_allclose(pt.ricci, [-2 / r**3, 1 / r**3, 1 / r**3], rtol=1e-12)
    np.testing.assert_allclose(pt.s, 0, atol=1e-14)
    np.testing.assert_allclose(pt.znorm2, 6 / r**6, rtol=1e-12)
    oracle = curvature_oracle(metric, t, 1e-3)
    np.testing.assert_allclose(oracle.ricci, pt.ricci, rtol=1e-5)


def test_ricci_agrees_with_christoffel_oracle_sphere():
    f = sp.sinh(T) + T**2 / 5
    metric = sphere("sinh(t) + t**2/5", (0.3, 1.5))
    for t0 in (0.5, 0.9, 1.3):
        ref = ricci_eigenvalues(sphere_warped(f), (t0, 0.8, 0.1))
        np.testing.assert_allclose(curvature_at(metric, t0).ricci, ref, rtol=1e-12)


def test_ricci_agrees_with_christoffel_oracle_torus():
    f1, f2 = sp.exp(3 * T / 10), 1 + T**2 / 5
    metric = SymmetricMetric.torus(expr("exp(3*t/10)", (0.5, 1.5)), expr("1 + t**2/5", (0.5, 1.5)))
    for t0 in (0.6, 1.0, 1.4):
        ref = ricci_eigenvalues(torus_warped(f1, f2), (t0, 0.0, 0.0))
        np.testing.assert_allclose(curvature_at(metric, t0).ricci, ref, rtol=1e-12)


def test_oracle_examples():
    assert curvature_oracle(sphere("sin(t)", (0, 3)), 1.0, 1e-3).K23 == pytest.approx(1, abs=1e-8)
    flat = curvature_oracle(sphere("t", (0, 3)), 1.0, 1e-3)
    assert max(abs(k) for k in (flat.K12, flat.K13, flat.K23)) <= 1e-9


def test_oracle_on_kasner_matches_closed_form():
    metric = kasner(0.5, (0.5, 2.0)).metric
    ref = -np.array(kasner_ricci(0.5)[:3])
    np.testing.assert_allclose(curvature_oracle(metric, 1.0, 1e-3).ricci, ref, rtol=1e-6)


def test_oracle_leaves_domain():
    with pytest.raises(DomainError):
        curvature_oracle(sphere("sin(t)", (0.5, 2.0)), 0.55, 0.1)


def test_outside_domain_and_degenerate():
    m = sphere("t - 1", (0.0, 3.0))
    with pytest.raises(DomainError):
        curvature_at(m, 3.5)
    with pytest.raises(DegeneracyError):
        curvature_at(m, 0.5)


def test_oracle_convergence_order():
    metric = sphere("sinh(t) + t**2/5", (0.3, 1.5))
    exact = np.array(curvature_at(metric, 0.9).ricci)
    e1 = np.max(np.abs(np.array(curvature_oracle(metric, 0.9, 0.05).ricci) - exact))
    e2 = np.max(np.abs(np.array(curvature_oracle(metric, 0.9, 0.025).ricci) - exact))
    assert e1 / e2 >= 15


def test_pole_limit_is_isotropic():
    metric = sphere("sin(t)", (0.0, 3.0))
    pt = curvature_at(metric, 1e-4)
    assert pt.K12 == pytest.approx(pt.K23, rel=1e-6)


def test_arclength_form_flat():
    metric = arclength_form(lambda r: np.ones_like(r), (0.5, 3.0))
    np.testing.assert_allclose(metric.f(np.array([0.0, 1.0, 2.5])), [0.5, 1.5, 3.0], rtol=1e-9)


def test_arclength_form_schwarzschild():
    m = 0.5
    metric = arclength_form(lambda r: 1 / (1 - 2 * m / r), (2 * m, 10.0))
    assert metric.f(0.0) == pytest.approx(2 * m, abs=1e-9)
    exact = SchwarzschildProfile(m, 10.0)
    t = np.array([0.5, 2.0, 5.0])
    np.testing.assert_allclose(metric.f(t), exact(t), rtol=1e-8)
    # dt/dr at r = 2 equals 1/u = sqrt(2)
    assert 1 / metric.f.deriv(float(exact.t_of_r(2.0)), 1) == pytest.approx(np.sqrt(2), rel=1e-7)


def test_double_across_horizon():
    cosh = SymmetricMetric.sphere(expr("cosh(t)", (0.0, 2.0)))
    d = double_across_horizon(cosh)
    t = np.linspace(-2, 2, 9)
    np.testing.assert_allclose(d.f(t), np.cosh(t), rtol=1e-14)
    schw = double_across_horizon(SymmetricMetric.sphere(SchwarzschildProfile(1.0, 20.0)))
    assert schw.f(0.0) == pytest.approx(2.0)
    a, b = curvature_at(schw, 1.3), curvature_at(schw, -1.3)
    assert a.ricci == pytest.approx(b.ricci, rel=1e-14)
    with pytest.raises(ReflectionError):
        double_across_horizon(SymmetricMetric.sphere(expr("t + 1", (0.0, 2.0))))


def test_grid_profile_derivative_orders():
    def err(n):
        g = np.linspace(0.0, 2.0, n)
        p = GridProfile(g, np.sin(g))
        t = np.linspace(0.3, 1.7, 17)
        return abs(p.deriv(t, 1) - np.cos(t)).max()
    assert err(101) / err(201) > 12


@given(st.floats(0.2, 5.0), st.floats(0.3, 2.5))
def test_homothety_scales_curvature(lam, t0):
    metric = sphere("sin(t) + t**3/10", (0.2, 2.8))
    base = curvature_at(metric, t0)
    scaled = curvature_at(metric.scaled(lam), lam * t0)
    np.testing.assert_allclose(np.array(scaled.ricci) * lam**2, base.ricci, rtol=1e-10, atol=1e-12)


@given(st.floats(-0.5, 0.5), st.floats(0.05, 0.5), st.floats(0.3, 1.6))
def test_curvature_point_identities(c1, c2, t0):
    metric = sphere(f"sinh(t) + {c1}*t**2 + {c2}*t**3", (0.25, 1.75))
    pt = curvature_at(metric, t0)
    ric = np.array(pt.ricci)
    scale = max(1.0, np.abs(ric).max())
    assert pt.s == pytest.approx(2 * (pt.K12 + pt.K13 + pt.K23), abs=1e-12 * scale)
    assert sum(pt.z) == pytest.approx(0, abs=1e-12 * scale)
    assert pt.znorm2 == pytest.approx(sum(z * z for z in pt.z), rel=1e-12, abs=1e-24)
    assert pt.rnorm2 == pytest.approx(float(ric @ ric), rel=1e-12)
