import mpmath as mp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from oracles import hyperbolic_ball_volume
from scipy import optimize

from symvar_lab import cli, quadrature
from symvar_lab.canonical import (
    SchwarzschildProfile,
    StaticPotential,
    kasner,
    kasner_zs2_margin,
)
from symvar_lab.errors import InputError
from symvar_lab.functionals import (
    FunctionalReport,
    JunctionField,
    L_apply,
    L_fd,
    Lstar_apply,
    PolynomialBump,
    bulk_integrals,
    conformal,
    el_residual,
    fd_Z2,
    functional_report,
    gradZ2,
    junction_relation,
    make_basket,
    pairing,
    radial_stretch,
    smoothing_phi,
    smoothing_psi_second,
    tau_sigma,
    volume,
)
from symvar_lab.geometry import SymmetricMetric, curvature_at
from symvar_lab.models import assemble_model
from symvar_lab.profiles import ClosedFormProfile

expr = ClosedFormProfile.from_expr


def sphere(e, dom):
    return SymmetricMetric.sphere(expr(e, dom))


def unit_volume_hyperbolic_ball():
    R = optimize.brentq(lambda R: hyperbolic_ball_volume(R) - 1.0, 0.1, 3.0, xtol=1e-15)
    return sphere("sinh(t)", (0.0, R))


# volume -------------------------------------------------------------------

def test_volume_round_sphere():
    assert volume(sphere("sin(t)", (0.0, np.pi))) == pytest.approx(2 * np.pi**2, rel=1e-12)


def test_volume_euclidean_ball():
    assert volume(sphere("t", (0.0, 2.0))) == pytest.approx(4 / 3 * np.pi * 8, rel=1e-12)


def test_volume_schwarzschild_two_quadratures():
    P = SchwarzschildProfile(1.0, 10.0)
    got = volume(SymmetricMetric.sphere(P))
    # r-chart integrand, and the substitution u = sqrt(1 - 2/r)
    direct = mp.quad(lambda r: 4 * mp.pi * r**2 / mp.sqrt(1 - 2 / r), [2, 3, 10])
    subst = mp.quad(lambda u: 64 * mp.pi / (1 - u * u) ** 4, [0, mp.sqrt(0.8)])
    assert float(direct) == pytest.approx(float(subst), rel=1e-8)
    assert got == pytest.approx(float(subst), rel=1e-8)


def test_volume_additive_empty_and_reversed():
    m = sphere("sinh(t)", (0.0, 2.0))
    assert volume(m, (0.0, 0.7)) + volume(m, (0.7, 2.0)) == pytest.approx(volume(m), rel=1e-12)
    assert volume(m, (1.0, 1.0)) == 0.0
    with pytest.raises(InputError):
        volume(m, (1.5, 0.5))


# functional report --------------------------------------------------------

def test_report_hyperbolic_unit_volume_piece():
    rep = FunctionalReport.from_integrals(bulk_integrals(1.0), eps=0.3)
    assert rep.Z2 == 0.0
    assert rep.Sminus2 == pytest.approx(6.0, rel=1e-15)


def test_report_hyperbolic_ball_by_quadrature():
    rep = functional_report(unit_volume_hyperbolic_ball(), 0.1)
    assert rep.volume == pytest.approx(1.0, rel=1e-12)
    assert rep.Z2 == pytest.approx(0.0, abs=1e-20)
    assert rep.Sminus2 == pytest.approx(6.0, rel=1e-10)


def test_report_nonnegative_scalar_curvature():
    rep = functional_report(sphere("sin(t)", (0.1, 3.0)), 0.5)
    assert rep.Sminus2 == 0.0
    assert rep.sigma == 0.0


def test_report_invariants_generic():
    eps = 0.02
    m = sphere("sinh(t) + t**2/5", (0.3, 1.5))
    rep = functional_report(m, eps)
    v = rep.volume
    assert min(rep.volume, rep.Z2, rep.Sminus2, rep.I_eps_minus) >= 0
    assert rep.I_eps_minus == pytest.approx(eps * v ** (1 / 3) * rep.Z2 + rep.Sminus2, rel=1e-14)
    expected_c = rep.int_sminus2 / (12 * rep.sigma * v) + eps * rep.Z2 / (6 * v)
    assert rep.c_const == pytest.approx(expected_c, rel=1e-14)


def test_report_rejects_negative_eps():
    with pytest.raises(InputError):
        functional_report(sphere("sinh(t)", (0.3, 1.5)), -1.0)


def _model_eps_term(delta, eps):
    asm = assemble_model(delta)
    rep = asm.report(eps)
    return eps * rep.volume ** (1 / 3) * rep.Z2, rep


def test_model_eps_term_within_factor_three_of_eps_over_delta():
    delta, eps = 1e-2, 1e-4
    term, rep = _model_eps_term(delta, eps)
    assert np.isfinite(rep.I_eps_minus)
    assert 1 / 3 <= term / (eps / delta) <= 3


def test_model_eps_term_constant_matches_two_schwarzschild_cores():
    # each core is nearly Schwarzschild of mass delta/2, whose exterior carries int|z|^2 = 6.4 pi / delta
    delta, eps = 1e-3, 1e-4
    term, rep = _model_eps_term(delta, eps)
    expected = 2 * 6.4 * np.pi * rep.volume ** (1 / 3)
    assert term / (eps / delta) == pytest.approx(expected, rel=0.05)


# smoothing ----------------------------------------------------------------

def test_smoothing_examples():
    assert smoothing_phi(0.1, -1.0) == -1.0
    assert smoothing_phi(0.1, 0.2) == pytest.approx(0.02, rel=1e-15)
    assert 0 < smoothing_phi(0.1, 0.05) < 0.005
    assert smoothing_phi(0.1, 0.0) == 0.0


def test_smoothing_monotone_and_convex_square():
    s = np.linspace(-0.05, 0.15, 1000)
    phi = smoothing_phi(0.1, s)
    assert np.all(np.diff(phi) >= 0)
    inner = np.linspace(0.0005, 0.0995, 200)
    assert np.all(smoothing_psi_second(0.1, inner) > 0)


@pytest.mark.parametrize("delta", [1e-1, 1e-2, 1e-3])
def test_smoothing_convergence(delta):
    s = np.concatenate([np.linspace(-10, 10, 2001), np.linspace(0, 2 * delta, 401)])
    dev = np.abs(smoothing_phi(delta, s) - np.minimum(s, 0))
    assert np.all(dev <= delta * np.maximum(np.abs(s), delta))


def test_smoothing_rejects_bad_delta():
    with pytest.raises(InputError):
        smoothing_phi(0.0, 1.0)


# potentials ---------------------------------------------------------------

def test_tau_on_unit_volume_hyperbolic_is_minus_one():
    m = unit_volume_hyperbolic_ball()
    pot = tau_sigma(m)
    t = np.linspace(0.05, m.domain[1] - 0.05, 11)
    np.testing.assert_allclose(pot.tau(t), -1.0, rtol=1e-9)


def test_tau_zero_potential_for_positive_curvature():
    pot = tau_sigma(sphere("sin(t)", (0.1, 3.0)))
    assert pot.zero and pot.sigma == 0
    assert pot.tau(1.0) == 0.0


def test_tau_normalization_on_model():
    asm = assemble_model(1e-2)
    rep = asm.report(1e-4)
    pot = tau_sigma(SymmetricMetric.sphere(asm.profile), eps=1e-4, report=rep)
    metric = SymmetricMetric.sphere(asm.profile)
    cap = quadrature.adaptive(lambda t: pot.tau(t) ** 2 * metric.volume_density(t), 0.0, asm.mu,
                              rel_tol=1e-11, points=[10 * asm.delta, asm.window[0]])
    bulk = (-6.0 / rep.sigma) ** 2 * sum(V - asm.cut_volume() for V in asm.bulk_volumes)
    assert rep.volume ** (1 / 3) * (2 * cap + bulk) == pytest.approx(1.0, abs=1e-6)
    assert np.all(pot.tau(np.linspace(0, asm.mu, 50)) <= 0)


# linearized scalar curvature ---------------------------------------------

class _Conformal:
    """``h = g`` as a perturbation (frame components all one)."""

    components = (0, 0, 0)

    def jet(self, t, i, order=2):
        one = np.ones_like(np.asarray(t, dtype=float))
        return [one] + [0 * one] * order


def test_L_of_metric_flat_and_sphere():
    h = _Conformal()
    assert np.max(np.abs(L_apply(h, sphere("t", (0.1, 2.0)))(np.linspace(0.2, 1.9, 5)))) < 1e-12
    np.testing.assert_allclose(L_apply(h, sphere("sin(t)", (0.1, 3.0)))(np.linspace(0.3, 2.8, 5)), -6, rtol=1e-12)


@pytest.mark.parametrize("direction", [conformal, radial_stretch])
def test_L_matches_finite_difference_on_hyperbolic(direction):
    m = sphere("sinh(t)", (0.2, 2.0))
    h = direction(PolynomialBump(1.1, 0.5, m.domain), "x")
    t = np.linspace(0.7, 1.5, 9)
    np.testing.assert_allclose(L_apply(h, m)(t), L_fd(h, m, t, e=1e-5), atol=1e-6)


def test_Lstar_of_one_is_minus_ricci():
    m = sphere("sinh(t) + t**2/5", (0.3, 1.5))
    t = np.linspace(0.4, 1.4, 7)
    np.testing.assert_allclose(Lstar_apply(expr("1 + 0*t", m.domain), m)(t), -np.array(curvature_at(m, t).ricci),
                               rtol=1e-14)


def test_Lstar_flat_t_squared():
    m = sphere("t", (0.1, 2.0))
    np.testing.assert_allclose(Lstar_apply(expr("t**2", m.domain), m)(np.linspace(0.2, 1.9, 5)), -4.0,
                               rtol=1e-13)


def test_Lstar_static_potential_schwarzschild():
    P = SchwarzschildProfile(1.0, 40.0)
    m = SymmetricMetric.sphere(P)
    t = P.t_of_r(np.linspace(2.05, 39.0, 200))
    assert np.max(np.abs(Lstar_apply(StaticPotential(P), m)(t))) < 1e-7


def test_Lstar_trace():
    m = sphere("sinh(t) + t**2/5", (0.3, 1.5))
    u = expr("exp(-t) + t**3", m.domain)
    t = np.linspace(0.4, 1.4, 7)
    pt = curvature_at(m, t)
    lap = u.deriv(t, 2) + m.mean_curvature(t) * u.deriv(t, 1)
    np.testing.assert_allclose(Lstar_apply(u, m)(t).sum(axis=0), -2 * lap - u(t) * pt.s, rtol=1e-12)


# gradient of Z^2 -----------------------------------------------------------

def test_gradZ2_vanishes_on_constant_curvature():
    for e in ("sin(t)", "sinh(t)"):
        m = sphere(e, (0.3, 1.5))
        assert np.max(np.abs(gradZ2(m)(np.linspace(0.4, 1.4, 7)))) < 1e-11


def _weak_rel(metric, basket):
    grad = gradZ2(metric)
    worst = 0.0
    for h in basket:
        fd = fd_Z2(metric, h)
        worst = max(worst, abs(pairing(grad, h, metric) - fd) / abs(fd))
    return worst


def test_gradZ2_weak_schwarzschild():
    P = SchwarzschildProfile(1.0, 60.0)
    m = SymmetricMetric.sphere(P)
    basket = [h for h in make_basket(m, support=(P.t_of_r(3.0), P.t_of_r(6.0)))]
    assert _weak_rel(m, basket) < 1e-4


def test_gradZ2_weak_kasner():
    m = kasner(0.5).metric
    assert _weak_rel(m, make_basket(m)) < 1e-4


@pytest.mark.parametrize("name", list(cli.metric_fleet()))
def test_gradient_consistency_fleet(name):
    for hid, err, allowed in cli.gradient_errors(cli.metric_fleet()[name]):
        assert err <= allowed, hid


# Euler-Lagrange residuals --------------------------------------------------

def test_static_vacuum_flat():
    m = sphere("t", (0.1, 2.0))
    res = el_residual("StaticVacuum", m, expr("-1 + 0*t", m.domain))
    assert res.sup == 0.0 and res.trace_sup == 0.0
    assert res.weak_sup < 1e-9  # finite-difference roundoff only


def test_missing_coefficients_raise():
    m = sphere("sinh(t)", (0.3, 1.5))
    tau = expr("-1 + 0*t", m.domain)
    with pytest.raises(InputError):
        el_residual("Zs2", m, tau)
    with pytest.raises(InputError):
        el_residual("FullIepsEL", m, tau)
    with pytest.raises(InputError):
        el_residual("StaticVacuum", m)
    with pytest.raises(InputError):
        el_residual("Nope", m, tau)


@pytest.mark.parametrize("name", list(cli.metric_fleet()))
def test_trace_consistency(name):
    assert cli._trace_mismatches(cli.metric_fleet()[name]) <= 1e-8


def test_weak_matches_pairing_on_generic():
    m = sphere("sinh(t) + t**2/5", (0.3, 1.5))
    res = el_residual("Zc2", m, expr("-1 - t**2/10", m.domain), alpha=0.5)
    for (hid, w), (_, p) in zip(res.weak, res.weak_pairing):
        assert w == pytest.approx(p, rel=1e-4, abs=1e-8 * res.weak_scale), hid


def test_kasner_zs2_weak_margin_positive():
    row, _ = kasner_zs2_margin(0.5)
    assert row.margin > 0


# scaling and junction -----------------------------------------------------

@given(st.sampled_from([0.5, 2.0]), st.floats(1e-3, 1.0))
def test_Ieps_scale_invariance(lam, eps):
    m = sphere("sinh(t) + t**2/5", (0.3, 1.5))
    a = functional_report(m, eps)
    b = functional_report(m.scaled(lam), eps)
    assert b.I_eps_minus == pytest.approx(a.I_eps_minus, rel=1e-8)
    assert b.Sminus2 == pytest.approx(a.Sminus2, rel=1e-8)


def test_junction_relation_stencil_order():
    fld = JunctionField()
    exact = fld.omega(fld.t_j)  # d/dt[(t - tj) e^{t/2}] at tj
    errs = []
    for h in (4e-2, 2e-2, 1e-2):
        lhs, rhs = junction_relation(fld, h)
        assert lhs == pytest.approx(rhs, rel=1e-3)
        errs.append(abs(lhs - rhs))
    assert exact == 0.0
    assert np.log2(errs[0] / errs[1]) >= 3.8 and np.log2(errs[1] / errs[2]) >= 3.8
