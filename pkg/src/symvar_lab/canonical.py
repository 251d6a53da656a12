"""Closed-form canonical metrics: Schwarzschild and the Kasner family.

Schwarzschild of mass ``m`` is handled in arclength form with the horizon at
``t = 0``.  With ``w = sqrt(r - 2m)`` the arclength is explicit::

    t(w) = w sqrt(2m + w^2) + 2m asinh(w / sqrt(2m))

and the static potential ``u = sqrt(1 - 2m/r)`` is exactly ``dr/dt``.
"""

from dataclasses import dataclass, field

import numpy as np

from . import quadrature
from .errors import InputError, NumericError
from .functionals import el_residual, integrals, laplacian, make_basket
from .geometry import (
    SymmetricMetric,
    curvature_at,
    curvature_oracle,
    double_across_horizon,
)
from .profiles import ClosedFormProfile, RadialProfile, ReflectedProfile

# ---------------------------------------------------------------------------
# Schwarzschild
# ---------------------------------------------------------------------------


class SchwarzschildProfile(RadialProfile):
    """Area radius ``r(t)`` of the Schwarzschild exterior, ``t`` = distance to the horizon.

    Derivatives are exact: ``r' = u``, ``r'' = m/r^2``, ``r''' = -2mu/r^3``,
    ``r'''' = 6m/r^4 - 14m^2/r^5`` and one more order so that ``u`` itself
    has a full jet.
    """

    max_order = 5

    def __init__(self, m, r_max):
        if m <= 0:
            raise InputError("Schwarzschild profile needs m > 0 (use a flat profile for m = 0)")
        if r_max <= 2 * m:
            raise InputError("r_max must exceed the horizon radius 2m")
        self.m = float(m)
        self.r_max = float(r_max)
        super().__init__((0.0, float(self.t_of_r(r_max))))

    def t_of_w(self, w):
        m2 = 2 * self.m
        return w * np.sqrt(m2 + w * w) + m2 * np.arcsinh(w / np.sqrt(m2))

    def t_of_r(self, r):
        r = np.asarray(r, dtype=float)
        if np.any(r < 2 * self.m):
            raise InputError("area radius inside the horizon")
        return self.t_of_w(np.sqrt(r - 2 * self.m))

    def w_of_t(self, t):
        t = np.asarray(t, dtype=float)
        m2 = 2 * self.m
        # t(w) is convex and increasing with t >= max(w^2, 2 sqrt(2m) w): start right of the root
        w = np.minimum(t / (2 * np.sqrt(m2)), np.sqrt(t))
        for _ in range(100):
            step = (self.t_of_w(w) - t) / (2 * np.sqrt(m2 + w * w))
            w = w - step
            if np.all(np.abs(step) <= 1e-15 * (1.0 + np.abs(w))):
                break
        else:
            raise NumericError("arclength inversion did not converge")
        return w

    def r_of_t(self, t):
        w = self.w_of_t(t)
        return 2 * self.m + w * w

    def u_of_t(self, t):
        w = self.w_of_t(t)
        return w / np.sqrt(2 * self.m + w * w)

    def _deriv(self, t, k):
        m = self.m
        w = self.w_of_t(t)
        r = 2 * m + w * w
        u = w / np.sqrt(r)
        out = [r, u, m / r**2, -2 * m * u / r**3, 6 * m / r**4 - 14 * m**2 / r**5,
               u * (-24 * m / r**5 + 70 * m**2 / r**6)][k]
        return float(out) if np.ndim(out) == 0 else out


class StaticPotential(RadialProfile):
    """``u = sqrt(1 - 2m/r)`` as a function of arclength (odd across the horizon)."""

    def __init__(self, profile):
        super().__init__(profile.domain)
        self.base = profile
        self.max_order = profile.max_order - 1

    def _deriv(self, t, k):
        return self.base.deriv(t, k + 1)


def _chain(r_jet, F_jet, k):
    """k-th t-derivative of ``F(r(t))`` from the jets of r(t) and F(r)."""
    r1, r2, r3, r4 = r_jet[1:5]
    F1, F2, F3, F4 = F_jet[1:5]
    return [F_jet[0],
            F1 * r1,
            F2 * r1**2 + F1 * r2,
            F3 * r1**3 + 3 * F2 * r1 * r2 + F1 * r3,
            F4 * r1**4 + 6 * F3 * r1**2 * r2 + F2 * (3 * r2**2 + 4 * r1 * r3) + F1 * r4][k]


# tau = scale * P(1 - 2m/r),  P(x) = 1 + 3x - x^2 + x^3/5
_P = np.polynomial.Polynomial([1.0, 3.0, -1.0, 0.2])


class SchwarzschildPotential(RadialProfile):
    """The Z_s^2 potential of the Schwarzschild exterior, as a function of arclength.

    Closed form ``tau(r) = -k P(1 - 2m/r)`` with ``P(x) = 1 + 3x - x^2 + x^3/5``.
    ``normalization="consistent"`` uses ``k = alpha/(16 m^2)`` (dimensionally
    homogeneous, solves the tensor equation for every m); ``"literal"`` uses
    ``k = alpha/(64 m^4)``, the literal limit of the integral representation,
    which coincides with the consistent one only at ``m = 1/2``.
    """

    def __init__(self, profile, alpha, normalization="consistent"):
        super().__init__(profile.domain)
        if normalization not in ("consistent", "literal"):
            raise InputError(f"unknown normalization {normalization!r}")
        self.profile = profile
        self.m = profile.m
        self.alpha = float(alpha)
        self.normalization = normalization
        m = self.m
        self.k = alpha / (16 * m**2) if normalization == "consistent" else alpha / (64 * m**4)
        # as a polynomial in y = 1/r
        y_poly = _P(np.polynomial.Polynomial([1.0, -2 * m]))
        self._Q = [-self.k * y_poly.deriv(j) for j in range(5)]

    def at_r(self, r, k=0):
        """``d^k tau / dr^k`` at area radius ``r``."""
        r = np.asarray(r, dtype=float)
        y = 1.0 / r
        # derivatives of F(y(r)), y = 1/r
        Q = [q(y) for q in self._Q]
        y1, y2, y3, y4 = -y**2, 2 * y**3, -6 * y**4, 24 * y**5
        return _chain([y, y1, y2, y3, y4], Q, k)

    def _deriv(self, t, k):
        r_jet = [self.profile.deriv(t, j) for j in range(5)]
        F_jet = [self.at_r(r_jet[0], j) for j in range(5)]
        out = _chain(r_jet, F_jet, k)
        return float(out) if np.ndim(out) == 0 else out

    @property
    def horizon_value(self):
        return -self.k

    @property
    def limit_value(self):
        return -self.k * float(_P(1.0))


def tau_by_quadrature(m, alpha, r, a_offset=1e-2, levels=4):
    """Evaluate the integral representation of the potential as ``a -> 2m``.

    For each inner radius ``a`` the regularized integral
    ``(alpha/8) u(r) [int_a^r ds / (s^5 (1-2m/s)^{3/2}) - 1/(m a^3 u(a))]`` is
    computed by adaptive quadrature in ``v = sqrt(1 - 2m/s)``; the limit is
    taken by Richardson extrapolation over ``u(a) = u0 2^-j`` (the error is
    odd in ``u(a)``).  Returns the literal limit (the ``"literal"`` scaling).
    """
    ur = np.sqrt(1 - 2 * m / r)
    u0 = min(np.sqrt(1 - 2 * m / (2 * m * (1 + a_offset))), 0.5 * ur)
    integrand = lambda v: (1 - v * v) ** 3 / (8 * m**4 * v * v)
    vals = []
    for j in range(levels):
        ua = u0 * 2.0**-j
        inner = quadrature.adaptive(integrand, ua, ur, rel_tol=1e-13, abs_tol=1e-15 / m**3)
        boundary = (1 - ua * ua) ** 3 / (8 * m**4 * ua)
        vals.append(alpha / 8 * ur * (inner - boundary))
    return richardson(vals, ratio=2.0, powers=(1, 3, 5))


def richardson(values, ratio, powers):
    """Eliminate error terms ``h^p`` (``p`` in ``powers``) from a sequence with ``h_j = h0 ratio^-j``."""
    table = list(values)
    for p in powers[:len(values) - 1]:
        fac = ratio**p
        table = [(fac * b - a) / (fac - 1) for a, b in zip(table[:-1], table[1:])]
    return table[-1]


@dataclass(frozen=True)
class SchwarzschildSolution:
    """Schwarzschild exterior (optionally doubled) with its static and Z_s^2 potentials."""

    m: float
    alpha: float
    metric: SymmetricMetric
    u_static: RadialProfile
    tau: RadialProfile
    doubled: bool = False
    profile: object = field(default=None, repr=False)

    def t_of_r(self, r):
        return self.profile.t_of_r(r)


def schwarzschild(m, alpha=1.0, r_max=None, doubled=False, normalization="consistent"):
    """Build a :class:`SchwarzschildSolution`; ``r_max`` defaults to ``1e4 m``."""
    if m <= 0 or alpha <= 0:
        raise InputError("need m > 0 and alpha > 0")
    prof = SchwarzschildProfile(m, r_max if r_max is not None else 1e4 * m)
    metric = SymmetricMetric.sphere(prof)
    tau = SchwarzschildPotential(prof, alpha, normalization)
    u = StaticPotential(prof)
    if doubled:
        metric = double_across_horizon(metric)
        tau = ReflectedProfile(tau)
    return SchwarzschildSolution(m, alpha, metric, u, tau, doubled, prof)


def schwarzschild_tau(m, alpha, r_max, normalization="consistent"):
    """The Z_s^2 potential on ``[2m, r_max]`` as a profile in arclength."""
    if r_max <= 2 * m:
        raise InputError("r_max must exceed 2m")
    if alpha <= 0:
        raise InputError("alpha must be positive")
    return SchwarzschildPotential(SchwarzschildProfile(m, r_max), alpha, normalization)


def limit_at_infinity(tau, radii):
    """Richardson estimate of ``tau(r -> inf)`` from values at ``r_j = r0 2^j``."""
    vals = [float(tau.at_r(r)) for r in radii]
    return richardson(vals, ratio=2.0, powers=(1, 2, 3, 4, 5))


def horizon_slope(tau, h=None):
    """One-sided normal derivative ``d tau/dt`` at the horizon, extrapolated.

    Forward 5-point differences at spacings ``h, h/2, h/4`` combined by
    Richardson (error ``O(h^4)``).
    """
    h = h if h is not None else 1e-2 * tau.m
    coef = np.array([-25.0, 48.0, -36.0, 16.0, -3.0]) / 12.0

    def forward(hh):
        return float(np.dot(coef, [tau(j * hh) for j in range(5)])) / hh

    return richardson([forward(h), forward(h / 2), forward(h / 4)], ratio=2.0, powers=(4, 5))


def verify_schwarzschild_zs2(m, alpha=1.0, n_grid=400, potential="tau", normalization="consistent",
                             weak=True):
    """Z_s^2 residuals of Schwarzschild on ``r in [2.05m, 40m]``.

    ``potential="u_static"`` substitutes the static potential for tau (a
    negative control: it solves the static equations, not these).  The
    weak basket is supported in ``r in [3m, 6m]``.
    """

    sol = schwarzschild(m, alpha, r_max=60 * m, normalization=normalization)
    P = sol.profile
    grid = P.t_of_r(np.linspace(2.05 * m, 40 * m, n_grid))
    pot = sol.tau if potential == "tau" else sol.u_static
    basket = make_basket(sol.metric, support=(P.t_of_r(3 * m), P.t_of_r(6 * m))) if weak else None
    return el_residual("Zs2", sol.metric, pot, alpha=alpha, grid=grid, basket=basket, weak=weak)


# ---------------------------------------------------------------------------
# mass and asymptotics
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MassFlux:
    """Flux of ``grad u`` (``u = -tau``) through area-radius spheres, extrapolated to infinity."""

    m_E: float
    flux_limit: float
    u_limit: float
    radii: tuple
    fluxes: tuple
    diagnostic: float


def _flux(solution, t, end=+1):
    # outward normal is +d_t at the right end and -d_t at the mirrored end
    f = solution.metric.f(end * t)
    return -4 * np.pi * f * f * end * solution.tau.deriv(end * t, 1)


def mass_flux(solution, s_list, end=+1, rtol=1e-6):
    """Extrapolated mass ``m_E`` from ``4 pi u_0 m_E = lim int <grad u, nu> dA``.

    ``s_list`` are increasing area radii in a geometric progression of
    ratio 2; both the flux and ``u = -tau`` are extrapolated in ``1/r``.
    ``end = -1`` uses the mirrored end of a doubled solution.

    Raises
    ------
    NumericError
        When successive extrapolants disagree by more than ``rtol``.
    """
    radii = np.asarray(s_list, dtype=float)
    if radii.size < 3 or np.any(np.diff(radii) <= 0):
        raise InputError("need >= 3 increasing radii")
    ratio = radii[1] / radii[0]
    ts = solution.t_of_r(radii)
    fluxes = [float(_flux(solution, t, end)) for t in ts]
    us = [-float(solution.tau(end * t)) for t in ts]
    powers = tuple(range(1, radii.size))
    F = richardson(fluxes, ratio, powers)
    F_prev = richardson(fluxes[:-1], ratio, powers)
    U = richardson(us, ratio, powers)
    scale = max(abs(F), max(abs(x) for x in fluxes), 1e-300)
    diag = abs(F - F_prev) / scale
    if diag > rtol and abs(F) > 1e-12 * scale:
        raise NumericError(f"flux sequence not converged ({diag:.2e})", achieved=diag)
    m_E = F / (4 * np.pi * U) if abs(U) > 0 else np.nan
    return MassFlux(float(m_E), float(F), float(U), tuple(radii), tuple(fluxes), float(diag))


def isotropic_radius(u, r, scale):
    """Isotropic radius ``rho(r)`` of ``u^-2 dr^2 + r^2 g_S2`` with ``rho ~ r`` at infinity.

    ``ln rho = ln r - int_r^inf (1/(s u(s)) - 1/s) ds``.
    """
    def integrand(s):
        return (1.0 / u(s) - 1.0) / s
    tail = quadrature.adaptive(integrand, r, np.inf, rel_tol=1e-12, abs_tol=1e-16 * scale)
    return r * np.exp(-tail)


def expansion_mass(solution, radii=None):
    """Fit ``omega = omega_E + A/rho + B/rho^2`` far out; mass is ``A / |omega_E|``.

    ``rho`` is the isotropic (asymptotically flat) radius; ``omega = tau``
    because ``s = 0``.
    """
    m = solution.m
    radii = np.asarray(radii if radii is not None else 50 * m * 2.0 ** np.arange(6), dtype=float)
    u = lambda s: np.sqrt(1 - 2 * m / s)
    rho = np.array([isotropic_radius(u, r, m) for r in radii])
    omega = np.array([float(solution.tau(t)) for t in solution.t_of_r(radii)])
    A = np.vstack([np.ones_like(rho), 1 / rho, 1 / rho**2]).T
    (w_E, a1, _), *_ = np.linalg.lstsq(A, omega, rcond=None)
    return float(a1 / abs(w_E)), float(w_E)


@dataclass(frozen=True)
class MassIdentity:
    lhs: float
    rhs: float
    rel_err: float
    tail_bound: float
    flux_plus: MassFlux
    flux_minus: MassFlux


def mass_identity_check(solution, R=None, tail_budget=1e-4):
    """Compare ``(alpha/4) int_N |z|^2`` with ``4 pi sum_ends u_i m_i`` on the doubled solution.

    The left side integrates the curvature engine's ``|z|^2`` over the
    exterior up to area radius ``R`` and doubles it; the tail beyond ``R``
    is added from ``|z|^2 = 6m^2/r^6`` (bounded by ``8 pi m^2 / (u(R) R^3)``).
    """

    if not solution.doubled:
        raise InputError("mass identity needs the doubled solution")
    m, alpha = solution.m, solution.alpha
    R = R if R is not None else 200 * m
    tR = float(solution.t_of_r(R))
    half = SymmetricMetric.sphere(solution.profile)
    marks = [float(solution.t_of_r(r)) for r in (3 * m, 10 * m, 50 * m) if r < R]
    ext = integrals(half, (0.0, tR), rel_tol=1e-11, points=marks).z2
    uR = np.sqrt(1 - 2 * m / R)
    tail = 8 * np.pi * m * m / R**3
    tail_bound = tail / uR - tail
    if tail_bound > tail_budget * ext:
        raise NumericError("tail bound exceeds budget; raise R", achieved=tail_bound / ext)
    lhs = alpha / 4 * 2 * (ext + tail)
    radii = R * 2.0 ** np.arange(6)
    fp = mass_flux(solution, radii, end=+1)
    fm = mass_flux(solution, radii, end=-1)
    rhs = 4 * np.pi * (fp.u_limit * fp.m_E + fm.u_limit * fm.m_E)
    return MassIdentity(float(lhs), float(rhs), float(abs(lhs - rhs) / abs(rhs)), float(tail_bound), fp, fm)


@dataclass(frozen=True)
class FlatnessFit:
    mass_fit: float
    decay_order: float
    radii: tuple
    rho: tuple
    remainders: tuple


def asymptotic_flatness_fit(m, k_max=4):
    """Fit the conformal factor ``psi = (r/rho)^2`` to ``1 + 2 m_hat/rho + c/rho^2``.

    Radii are ``10 m 2^k`` (unit scale when ``m = 0``).  The decay order is
    the mean of ``log2`` ratios of successive remainders
    ``psi - 1 - 2 m_hat/rho``; it is infinite when the remainder vanishes.
    """
    if m < 0:
        raise InputError("mass must be nonnegative")
    scale = m if m > 0 else 1.0
    radii = 10 * scale * 2.0 ** np.arange(k_max + 1)
    u = (lambda s: np.sqrt(1 - 2 * m / s)) if m > 0 else (lambda s: 1.0)
    rho = np.array([isotropic_radius(u, r, scale) for r in radii])
    psi = (radii / rho) ** 2
    A = np.vstack([2 / rho, 1 / rho**2]).T
    (m_hat, _), *_ = np.linalg.lstsq(A, psi - 1, rcond=None)
    rem = psi - 1 - 2 * m_hat / rho
    if np.all(np.abs(rem) <= 1e-14 * scale):
        order = np.inf
    else:
        ratios = np.abs(rem[:-1] / rem[1:])
        order = float(np.mean(np.log(ratios) / np.log(rho[1:] / rho[:-1])))
        if not order > 0:
            raise NumericError("flatness remainder does not decay", achieved=order)
    return FlatnessFit(float(m_hat), order, tuple(radii), tuple(rho), tuple(rem))


# ---------------------------------------------------------------------------
# Kasner
# ---------------------------------------------------------------------------


def kasner_exponents(d):
    """Exponents ``(a, b, c)`` of the Kasner metric ``dt^2 + t^2a dth1^2 + t^2b dth2^2``.

    ``a = (d - 1)/(d + 1/d - 1)``, ``b = (1/d - 1)/(d + 1/d - 1)``,
    ``c = 1 - a - b`` (the exponent of the static potential ``u = t^c``).
    """
    if not 0 < d < 1:
        raise InputError("d must lie in (0, 1)")
    D = d + 1 / d - 1
    a = (d - 1) / D
    b = (1 / d - 1) / D
    return a, b, 1 - a - b


# lambda_i = SIGN * t^2 ric_i: the coefficients are minus the Ricci eigenvalues
LAMBDA_SIGN = -1.0


def kasner_ricci(d):
    """``(lambda1, lambda2, lambda3, lambda_sq)`` with ``ric_i = -lambda_i / t^2``.

    From the closed-form Ricci eigenvalues ``(ab, ac, bc) / t^2``; the
    coefficients sum to zero (scalar flatness).
    """
    a, b, c = kasner_exponents(d)
    lam = tuple(LAMBDA_SIGN * x for x in (a * b, a * c, b * c))
    return lam + (sum(x * x for x in lam),)


def _power(p, domain):
    fns = []
    for k in range(5):
        coef = np.prod([p - j for j in range(k)]) if k else 1.0
        fns.append(lambda t, k=k, coef=coef: coef * np.asarray(t, dtype=float) ** (p - k))
    return ClosedFormProfile(fns, domain, label=f"t^{p:.6g}")


@dataclass(frozen=True)
class KasnerSolution:
    d: float
    a: float
    b: float
    c_exp: float
    metric: SymmetricMetric
    lambdas: tuple
    lambda_sq: float
    u_B5: RadialProfile
    c1: float = 0.0
    c2: float = 0.0


class _KasnerPotential(RadialProfile):
    """``u = K t^-2 + c1 t^(1 - (a+b)) + c2`` with ``K = lambda^2 / (8 (3 - (a+b)))``."""

    def __init__(self, K, c1, c2, e, domain):
        super().__init__(domain)
        self.terms = [(K, _power(-2.0, domain)), (c1, _power(e, domain))]
        self.c2 = c2

    def _deriv(self, t, k):
        out = sum(w * p.deriv(t, k) for w, p in self.terms if w)
        if k == 0:
            out = out + self.c2
        out = out + 0.0 * np.asarray(t)
        return float(out) if np.ndim(out) == 0 else out


def kasner(d, t_range=(1.0, 2.0), c1=0.0, c2=0.0):
    a, b, c = kasner_exponents(d)
    lam = kasner_ricci(d)
    metric = SymmetricMetric.torus(_power(a, t_range), _power(b, t_range))
    K = lam[3] / (8 * (3 - (a + b)))
    u = _KasnerPotential(K, c1, c2, 1 - (a + b), t_range)
    return KasnerSolution(d, a, b, c, metric, lam[:3], lam[3], u, c1, c2)


def kasner_static_check(d, exponent_shift=0.0, n_grid=101):
    """Static vacuum residual of the Kasner metric with ``u = t^(c + shift)`` on ``t in [1, 2]``."""

    sol = kasner(d)
    u = _power(sol.c_exp + exponent_shift, sol.metric.domain)
    grid = np.linspace(1.0, 2.0, n_grid)
    return el_residual("StaticVacuum", sol.metric, u, grid=grid, weak=False)


@dataclass(frozen=True)
class RefutationRow:
    d: float
    lambda_sq: float
    margin: float
    ratio: float
    pointwise_sup: float
    trace_sup: float


def kasner_zs2_margin(d, n_grid=101):
    """Weak Z_s^2 residual of Kasner with ``tau = -u`` from the trace solution (``c1 = c2 = 0``).

    The margin is ``max_h |W(h)| / int sum_i |h_i| dV`` over the standard
    basket, an average of residual components comparable to ``lambda^2``.
    """

    sol = kasner(d)
    tau = _Negated(sol.u_B5)
    basket = make_basket(sol.metric)
    res = el_residual("Zs2", sol.metric, tau, alpha=1.0, grid=np.linspace(1.0, 2.0, n_grid), basket=basket)
    norms = {}
    for h in basket:
        nodes, weights = quadrature.gauss_legendre_nodes(*h.support)
        norms[h.id] = float(np.dot(weights, np.sum(np.abs(h.values(nodes)), axis=0)
                                   * sol.metric.volume_density(nodes)))
    margin = max(abs(v) / norms[k] for k, v in res.weak)
    return RefutationRow(d, sol.lambda_sq, margin, margin / sol.lambda_sq, res.sup, res.trace_sup), res


class _Negated(RadialProfile):
    def __init__(self, base):
        super().__init__(base.domain)
        self.base = base
        self.max_order = base.max_order

    def _deriv(self, t, k):
        return -self.base.deriv(t, k)


def kasner_zs2_refutation(d_grid, map_fn=map):
    """Margins of the Z_s^2 residual over a d grid (rows in grid order)."""
    d_grid = np.asarray(d_grid, dtype=float)
    if np.any((d_grid <= 0) | (d_grid >= 1)):
        raise InputError("d grid must lie in (0, 1)")
    return list(map_fn(lambda d: kasner_zs2_margin(d)[0], d_grid))


def kasner_trace_residual(d, t):
    """``Lap u - |z|^2 / 4`` for the trace-equation potential (``c1 = c2 = 0``)."""

    sol = kasner(d)
    pt = curvature_at(sol.metric, t)
    return laplacian(sol.u_B5, sol.metric, t) - pt.znorm2 / 4


READINGS = ("denominator", "split")
CONVENTIONS = ("literal", "repaired")


def _b_factor(d, reading):
    if reading == "denominator":
        return 2 * d * d + 3 / (d * d - d + 1)
    return 2 * d * d + 3 / d**2 - d + 1


def b8_b9_audit(d):
    """Both sides of the two closing identities for every sign convention and reading.

    ``literal`` takes ``lambda1 = ab``; ``repaired`` takes ``lambda1 = -ab``
    (so the coefficients sum to zero); ``lambda2 = a(a-1) + ab`` and
    ``lambda3 = b(b-1) + ab`` in both.  ``denominator`` reads the factor as
    ``2d^2 + 3/(d^2 - d + 1)``, ``split`` as ``2d^2 + 3/d^2 - d + 1``.
    No pass/fail is asserted here.
    """
    a, b, _ = kasner_exponents(d)
    rows = []
    for conv in CONVENTIONS:
        l1 = a * b if conv == "literal" else -a * b
        l2 = a * (a - 1) + a * b
        l3 = b * (b - 1) + a * b
        lam2 = l1 * l1 + l2 * l2 + l3 * l3
        lhs8 = 2 * (a * a * (l2 - l1) ** 2 + b * b * (l3 - l1) ** 2)
        rhs9 = (-lam2 + 6 * l1 - 2 * a * l2 - 2 * b * l3) / (8 * (3 - (a + b)))
        for reading in READINGS:
            k = _b_factor(d, reading)
            rows.append({"d": d, "convention": conv, "reading": reading,
                         "lhs_B8": lhs8, "rhs_B8": k * lam2 * b * b,
                         "lhs_B9": -6 + 2 * b * (1 - d) + b * b * k, "rhs_B9": rhs9,
                         "lambda_sum": l1 + l2 + l3})
    return rows


@dataclass(frozen=True)
class KasnerRicciCheck:
    d: float
    closed_form: tuple
    oracle: tuple
    sign: float
    rel_err: float


def kasner_ricci_check(d, t=1.0, h=1e-3):
    """Compare ``ric_i = -lambda_i / t^2`` against the finite-difference oracle at ``t``.

    ``sign`` is the global flag :data:`LAMBDA_SIGN` relating the
    coefficients to the Ricci eigenvalues.
    """

    a, b, _ = kasner_exponents(d)
    metric = SymmetricMetric.torus(_power(a, (t / 2, 2 * t)), _power(b, (t / 2, 2 * t)))
    lam = kasner_ricci(d)[:3]
    closed = tuple(LAMBDA_SIGN * x / t**2 for x in lam)
    oracle = tuple(float(x) for x in curvature_oracle(metric, t, h).ricci)
    scale = max(abs(x) for x in closed)
    err = max(abs(x - y) for x, y in zip(closed, oracle)) / scale
    return KasnerRicciCheck(d, closed, oracle, LAMBDA_SIGN, float(err))


def b9_summary(d_grid):
    """For each (convention, reading): whether ``lhs_B9 < rhs_B9`` at every d of the grid."""
    hold = {(c, r): True for c in CONVENTIONS for r in READINGS}
    for d in d_grid:
        for row in b8_b9_audit(d):
            key = (row["convention"], row["reading"])
            hold[key] = hold[key] and bool(row["lhs_B9"] < row["rhs_B9"])
    return hold


def homothety_check(m=1.0, lam=2.0, alpha=1.0, n=50):
    """Max relative deviation of ``tau`` and ``|z|^2`` under ``m -> lam m``.

    With ``alpha`` scaled by ``lam^2`` the potential is invariant:
    ``tau_{lam m, lam^2 alpha}(lam r) = tau_{m, alpha}(r)``, and
    ``|z|^2`` scales by ``lam^-4``.
    """
    base = schwarzschild(m, alpha, r_max=60 * m)
    big = schwarzschild(lam * m, lam**2 * alpha, r_max=60 * lam * m)
    r = np.linspace(2.05 * m, 40 * m, n)
    t0 = base.t_of_r(r)
    t1 = big.t_of_r(lam * r)
    dev_tau = np.max(np.abs(big.tau(t1) - base.tau(t0)) / np.abs(base.tau(t0)))
    z0 = curvature_at(base.metric, t0).znorm2
    z1 = curvature_at(big.metric, t1).znorm2 * lam**4
    dev_z = np.max(np.abs(z1 - z0) / z0)
    return float(max(dev_tau, dev_z))
