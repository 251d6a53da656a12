"""Functionals, curvature operators and Euler-Lagrange residuals on symmetric metrics.

Diagonal tensor fields are returned as callables ``t -> array(3, *t.shape)``
holding orthonormal-frame components along ``(d_t, fiber1, fiber2)``.  For the
metrics in scope every tensor built from radial data is diagonal in this frame,
so off-diagonal components are never assembled.

Residual tensors of the five systems (``a`` the Z^2 weight, ``tau`` the
potential, ``Lap`` the Laplacian, ``c`` the Lagrange constant)::

    Z2sys         grad Z^2
    Zc2, Zs2      alpha grad Z^2 + L* tau
    StaticVacuum  L* tau
    FullIepsEL    eps grad Z^2 + L* tau + (s tau / 4 + c) g

Each comes with a trace equation evaluated independently of the tensor:

    Z2sys         -(Lap s + 3|z|^2) / 6
    Zc2, Zs2      -2 Lap(tau + alpha s/12) - alpha|z|^2/2 - s tau
    StaticVacuum  -2 Lap tau - s tau
    FullIepsEL    -(2 Lap(tau + eps s/12) + s tau/4 + eps|z|^2/2 - 3c)
"""

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import integrate

from . import _kernels, quadrature
from .errors import InputError, NumericError
from .geometry import SPHERE, curvature_at, diagonal_curvature
from .profiles import RadialProfile

SYSTEMS = ("Z2sys", "Zc2", "Zs2", "StaticVacuum", "FullIepsEL")


def _kernel(metric, name):
    return getattr(_kernels, f"{name}_{metric.kind}")


def _interior(metric, interval):
    lo, hi = metric.domain if interval is None else (float(interval[0]), float(interval[1]))
    if hi < lo:
        raise InputError(f"reversed interval ({lo}, {hi})")
    slack = 1e-12 * max(1.0, metric.length)
    if lo < metric.domain[0] - slack or hi > metric.domain[1] + slack:
        raise InputError("interval leaves the metric domain")
    return lo, hi


# ---------------------------------------------------------------------------
# integrals and the functional report
# ---------------------------------------------------------------------------


def volume(metric, subinterval=None):
    """Volume of ``{t in subinterval}`` (angles integrated out)."""
    lo, hi = _interior(metric, subinterval)
    return quadrature.adaptive(metric.volume_density, lo, hi)


@dataclass(frozen=True)
class Integrals:
    """Raw integrals ``(vol, int |z|^2 dV, int (s^-)^2 dV)``; additive over pieces."""

    volume: float
    z2: float
    sminus2: float

    def __add__(self, other):
        return Integrals(self.volume + other.volume, self.z2 + other.z2, self.sminus2 + other.sminus2)

    def scaled(self, k):
        return Integrals(k * self.volume, k * self.z2, k * self.sminus2)


def integrals(metric, subinterval=None, rel_tol=quadrature.REL_TOL, points=None):
    """Integrate volume, |z|^2 and (s^-)^2 over ``subinterval`` in one adaptive pass."""
    lo, hi = _interior(metric, subinterval)

    def integrand(t):
        pt = curvature_at(metric, t)
        dv = metric.volume_density(t)
        return np.array([dv, pt.znorm2 * dv, np.minimum(pt.s, 0.0) ** 2 * dv])

    scale = float(np.max(integrand(np.linspace(lo, hi, 7)[1:-1])))
    vals = quadrature.adaptive_vector(integrand, lo, hi, rel_tol, abs_tol=1e-14 * scale * (hi - lo),
                                      points=points)
    return Integrals(*(float(v) for v in vals))


def bulk_integrals(volume_, s_bulk=-6.0):
    """Closed-form integrals of a constant-curvature piece (z = 0)."""
    return Integrals(volume_, 0.0, min(s_bulk, 0.0) ** 2 * volume_)


@dataclass(frozen=True)
class FunctionalReport:
    """Functional values of one metric.  ``Z2`` is unweighted; the ``v^{1/3}`` enters ``I_eps_minus``."""

    volume: float
    Z2: float
    Sminus2: float
    sigma: float
    eps: float
    I_eps_minus: float
    c_const: float
    int_sminus2: float

    @classmethod
    def from_integrals(cls, ints, eps):
        v = ints.volume
        sm = np.sqrt(v ** (1 / 3) * ints.sminus2)
        c = eps * ints.z2 / (6 * v)
        if sm > 0:
            c += ints.sminus2 / (12 * sm * v)
        return cls(v, ints.z2, sm, sm, eps, eps * v ** (1 / 3) * ints.z2 + sm, c, ints.sminus2)

    def as_dict(self):
        return dict(self.__dict__)


def functional_report(metric, eps, subinterval=None, extra=None):
    """Evaluate ``vol, Z^2, S^-2, sigma, I_eps^-`` and ``c``.

    ``extra`` is an :class:`Integrals` added to the quadrature (closed-form
    bulk regions of model manifolds).
    """
    if eps < 0:
        raise InputError("eps must be nonnegative")
    ints = integrals(metric, subinterval)
    if extra is not None:
        ints = ints + extra
    return FunctionalReport.from_integrals(ints, eps)


# ---------------------------------------------------------------------------
# smoothing of s^-
# ---------------------------------------------------------------------------


def _smoothstep(x):
    """C-infinity step, 0 for x <= 0 and 1 for x >= 1, flat at both ends."""
    x = np.clip(x, 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        a = np.where(x > 0, np.exp(-1.0 / np.where(x > 0, x, 1.0)), 0.0)
        b = np.where(x < 1, np.exp(-1.0 / np.where(x < 1, 1 - x, 1.0)), 0.0)
    return a / (a + b)


def _flat_bump(y):
    inside = np.abs(y) < 1
    yy = np.where(inside, y, 0.0)
    return np.where(inside, np.exp(-1.0 / (1.0 - yy * yy)), 0.0)


class _Smoother:
    """Second derivative profile ``R`` on [0, 1] for the smoothing of s^-.

    ``psi = phi^2`` has ``psi'' = 2 delta^2 + (2 - 2 delta^2) R(s/delta)``
    with ``R = spike + sum_j a_j bump_j``; the spike (height 1, width w) gives
    ``psi = s^2`` near 0, the three bumps close the zeroth and first moments
    (so ``psi`` continues as ``delta^2 s^2``) and push ``psi(delta/2)`` below
    ``delta^4/4``.  ``w`` is shrunk until ``R > -kappa/2`` with
    ``kappa = delta^2/(1 - delta^2)``, i.e. ``psi'' > 0``.
    """

    CENTERS = (0.2, 0.5, 0.8)
    HALF = 0.1

    def __init__(self, delta):
        self.delta = delta
        kappa = delta**2 / (1 - delta**2)
        w = 0.5 * kappa
        for _ in range(200):
            self.w = w
            self._solve()
            if self._min_R() > -0.5 * kappa:
                break
            w *= 0.7
        self.kappa = kappa

    def spike(self, x):
        return np.where(x < self.w, 1.0 - _smoothstep(np.asarray(x) / self.w), 0.0)

    def bump(self, j, x):
        return _flat_bump((np.asarray(x) - self.CENTERS[j]) / self.HALF)

    def _moments(self, fn, lo, hi):
        m0 = integrate.quad(fn, lo, hi, epsabs=1e-16, epsrel=1e-13, limit=200)[0]
        m1 = integrate.quad(lambda x: x * fn(x), lo, hi, epsabs=1e-16, epsrel=1e-13, limit=200)[0]
        return m0, m1

    def _solve(self):
        w = self.w
        self.spike_m = self._moments(self.spike, 0.0, w)
        self.bump_m = [self._moments(lambda x, j=j: self.bump(j, x), c - self.HALF, c + self.HALF)
                       for j, c in enumerate(self.CENTERS)]
        G = [self._G_bump(j, 0.5) for j in range(3)]
        target = -0.3 * self.spike_m[0]
        A = np.array([[m[0] for m in self.bump_m], [m[1] for m in self.bump_m], G])
        rhs = -np.array([self.spike_m[0], self.spike_m[1], 0.5 * self.spike_m[0] - self.spike_m[1] - target])
        self.coef = np.linalg.solve(A, rhs)

    def _min_R(self):
        x = np.linspace(0, 1, 4001)
        return float(np.min(self.R(x)))

    def R(self, x):
        out = self.spike(x)
        for j, a in enumerate(self.coef):
            out = out + a * self.bump(j, x)
        return out

    def _G_piece(self, fn, lo, hi, moments, x):
        # int_lo^min(x,hi) (x - y) fn(y) dy
        if x <= lo:
            return 0.0
        if x >= hi:
            return x * moments[0] - moments[1]
        return integrate.quad(lambda y: (x - y) * fn(y), lo, x, epsabs=1e-18, epsrel=1e-13, limit=200)[0]

    def _G_bump(self, j, x):
        c = self.CENTERS[j]
        m = self.bump_m[j] if hasattr(self, "bump_m") else None
        return self._G_piece(lambda y: self.bump(j, y), c - self.HALF, c + self.HALF, m, x)

    def G(self, x):
        out = self._G_piece(self.spike, 0.0, self.w, self.spike_m, x)
        for j, a in enumerate(self.coef):
            out += a * self._G_bump(j, x)
        return out

    def psi(self, s):
        d = self.delta
        return d * d * s * s + (2 - 2 * d * d) * d * d * self.G(s / d)


@lru_cache(maxsize=32)
def _smoother(delta):
    return _Smoother(delta)


def smoothing_phi(delta, s):
    """Smooth monotone replacement of ``s^- = min(s, 0)``.

    ``phi(s) = s`` for ``s <= 0`` and ``phi(s) = delta s`` for ``s >= delta``;
    in between ``phi = sqrt(psi)`` with ``psi`` strictly convex, built so that
    ``phi <= delta^2`` on ``[0, delta]``.

    Parameters
    ----------
    delta : float
        Width of the transition, ``0 < delta < 1``.
    s : float or array_like
    """
    if not 0 < delta < 1:
        raise InputError("delta must lie in (0, 1)")
    s_arr = np.asarray(s, dtype=float)
    out = np.where(s_arr <= 0, s_arr, delta * s_arr)
    mid = (s_arr > 0) & (s_arr < delta)
    if np.any(mid):
        sm = _smoother(float(delta))
        vals = [np.sqrt(max(sm.psi(float(x)), 0.0)) for x in s_arr[mid]]
        out = out.copy()
        out[mid] = vals
    return float(out) if out.ndim == 0 else out


def smoothing_psi_second(delta, s):
    """``(phi^2)''`` on the transition interval (positive by construction)."""
    sm = _smoother(float(delta))
    x = np.asarray(s, dtype=float) / delta
    return 2 * delta**2 + (2 - 2 * delta**2) * sm.R(x)


# ---------------------------------------------------------------------------
# potentials
# ---------------------------------------------------------------------------


class ScalarCurvatureProfile(RadialProfile):
    """``s(t)`` of a metric with derivatives to order 2 from the symbolic kernel."""

    max_order = 2

    def __init__(self, metric):
        super().__init__(metric.domain)
        self.metric = metric
        self._kern = _kernel(metric, "scalar_jet")

    def _deriv(self, t, k):
        return self._kern(*self.metric.jets(t))[k]


class _Affine(RadialProfile):
    """``a * clip(p) + b * q`` with ``clip`` the negative part (used for tau and omega)."""

    def __init__(self, s_profile, neg_scale, lin_scale):
        super().__init__(s_profile.domain)
        self.s = s_profile
        self.max_order = s_profile.max_order
        self.neg_scale = neg_scale
        self.lin_scale = lin_scale

    def _deriv(self, t, k):
        val = self.s.deriv(t, k)
        neg = np.where(self.s.deriv(t, 0) < 0, val, 0.0)
        out = self.neg_scale * neg + self.lin_scale * val
        return float(out) if np.ndim(out) == 0 else out


class ConstantProfile(RadialProfile):
    def __init__(self, value, domain):
        super().__init__(domain)
        self.value = float(value)

    def _deriv(self, t, k):
        out = np.full(np.shape(t), self.value if k == 0 else 0.0)
        return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class PotentialField:
    """``tau = s^-/sigma`` and ``omega = tau + eps s/12``; ``zero`` marks sigma = 0."""

    tau: RadialProfile
    omega: RadialProfile
    alpha: float = 0.0
    eps: float = 0.0
    sigma: float = 0.0
    zero: bool = False

    @classmethod
    def given(cls, tau, alpha=0.0, eps=0.0):
        """Wrap an externally supplied potential (for example a closed form)."""
        return cls(tau, tau, alpha, eps, np.nan, False)


def tau_sigma(metric, eps=0.0, alpha=0.0, report=None):
    """Normalized negative part of the scalar curvature.

    ``report`` supplies sigma when the metric carries closed-form bulk pieces
    the quadrature cannot see.  Returns a zero potential when ``s >= 0``.
    """
    rep = report if report is not None else functional_report(metric, eps)
    s = ScalarCurvatureProfile(metric)
    if rep.sigma == 0:
        zero = ConstantProfile(0.0, metric.domain)
        return PotentialField(zero, _Affine(s, 0.0, eps / 12), alpha, eps, 0.0, True)
    tau = _Affine(s, 1.0 / rep.sigma, 0.0)
    return PotentialField(tau, _Affine(s, 1.0 / rep.sigma, eps / 12), alpha, eps, rep.sigma, False)


# ---------------------------------------------------------------------------
# operators
# ---------------------------------------------------------------------------


def laplacian(u, metric, t):
    """``Lap u = u'' + H u'`` for a radial function."""
    return u.deriv(t, 2) + metric.mean_curvature(t) * u.deriv(t, 1)


def _fiber_log_derivs(metric, t):
    if metric.kind == SPHERE:
        q = metric.f.deriv(t, 1) / metric.f(t)
        return q, q
    return tuple(p.deriv(t, 1) / p(t) for p in metric.profiles)


def Lstar_apply(u, metric):
    """``L* u = D^2 u - (Lap u) g - u Ric`` as a diagonal field.

    For radial ``u`` the Hessian is ``diag(u'', u' f1'/f1, u' f2'/f2)``.
    """
    def field(t):
        t = metric.check(t)
        u0, u1, u2 = u.deriv(t, 0), u.deriv(t, 1), u.deriv(t, 2)
        q1, q2 = _fiber_log_derivs(metric, t)
        lap = u2 + (q1 + q2) * u1
        ric = curvature_at(metric, t).ricci
        hess = (u2, u1 * q1, u1 * q2)
        return np.array([h - lap - u0 * r for h, r in zip(hess, ric)])
    return field


def gradZ2(metric):
    """L2 gradient of ``Z^2 = int |z|^2 dV`` as a diagonal field.

    Convention: ``d/de Z^2(g + e h) = int <grad Z^2, h> dV``.
    """
    kern = _kernel(metric, "grad_z2")
    degree = min(p.max_order for p in metric.profiles)
    if degree < 4:
        raise NumericError("grad Z^2 needs warping derivatives through order 4")

    def field(t):
        t = metric.check(t)
        return np.array(kern(*metric.jets(t)), dtype=float)
    return field


@dataclass(frozen=True)
class Perturbation:
    """Diagonal radial perturbation with frame components ``(h1, h2, h3)``.

    Components are profiles or ``None`` (zero); ``support`` bounds where any
    component is nonzero.
    """

    id: str
    components: tuple
    support: tuple

    def jet(self, t, i, order=2):
        p = self.components[i]
        if p is None:
            z = np.zeros(np.shape(t)) if np.ndim(t) else 0.0
            return [z] * (order + 1)
        return p.jet(t, order)

    def values(self, t):
        return np.array([self.jet(t, i, 0)[0] for i in range(3)])

    def trace(self, t):
        return self.values(t).sum(axis=0)


class PolynomialBump(RadialProfile):
    """``(1 - x^2)^3`` with ``x = (t - center)/halfwidth``; C^2, zero outside."""

    _poly = np.polynomial.Polynomial([1.0, 0.0, -3.0, 0.0, 3.0, 0.0, -1.0])

    def __init__(self, center, halfwidth, domain):
        super().__init__(domain)
        self.center = float(center)
        self.halfwidth = float(halfwidth)
        self._d = [self._poly.deriv(k) for k in range(5)]

    @property
    def support(self):
        return (self.center - self.halfwidth, self.center + self.halfwidth)

    def _deriv(self, t, k):
        x = (np.asarray(t) - self.center) / self.halfwidth
        out = np.where(np.abs(x) < 1, self._d[k](x), 0.0) / self.halfwidth**k
        return float(out) if out.ndim == 0 else out


BUMP_LAYOUT = ((0.5, 0.5), (0.4, 0.3), (0.65, 0.3))


def conformal(bump, label):
    return Perturbation(f"conformal-{label}", (bump, bump, bump), bump.support)


def radial_stretch(bump, label):
    return Perturbation(f"stretch-{label}", (bump, None, None), bump.support)


def make_basket(metric, support=None):
    """The standard test perturbations: three bumps, each conformal and radial-stretch.

    ``support`` defaults to the middle third of the metric domain.
    """
    lo, hi = metric.domain
    if support is None:
        a, b = lo + (hi - lo) / 3, lo + 2 * (hi - lo) / 3
    else:
        a, b = _interior(metric, support)
    L = b - a
    basket = []
    for k, (c, w) in enumerate(BUMP_LAYOUT, start=1):
        bump = PolynomialBump(a + c * L, w * L, metric.domain)
        basket += [conformal(bump, k), radial_stretch(bump, k)]
    return basket


def L_apply(h, metric):
    """Linearized scalar curvature ``L(h) = -Lap tr h + div div h - <r, h>``, as ``t -> value``."""
    kern = _kernel(metric, "linearized_scalar")

    def field(t):
        t = metric.check(t)
        hj = [d for i in range(3) for d in h.jet(t, i, 2)]
        return kern(*metric.jets(t), *hj)[0]
    return field


def perturbed_curvature(metric, h, e, t):
    """Curvature and volume density of ``g + e h`` at ``t``."""
    t = np.asarray(t, dtype=float)
    h1 = h.jet(t, 0, 1)
    A = (1 + e * h1[0], e * h1[1])
    Bs = []
    for i, p in enumerate(metric.profiles if metric.kind != SPHERE else (metric.f, metric.f)):
        f0, f1, f2 = p.jet(t, 2)
        k0, k1, k2 = h.jet(t, i + 1, 2)
        Bs.append((f0 * f0 * (1 + e * k0),
                   2 * f0 * f1 * (1 + e * k0) + f0 * f0 * e * k1,
                   2 * (f1 * f1 + f0 * f2) * (1 + e * k0) + 4 * f0 * f1 * e * k1 + f0 * f0 * e * k2))
    if metric.kind == SPHERE:
        if h.components[1] is not h.components[2]:
            raise InputError("sphere-warped perturbations need equal fiber components")
        return diagonal_curvature(SPHERE, A, Bs[0])
    return diagonal_curvature(metric.kind, A, Bs[0], Bs[1])


def L_fd(h, metric, t, e=1e-5):
    """Centered finite difference of ``s(g + e h)`` (oracle for :func:`L_apply`)."""
    return (perturbed_curvature(metric, h, e, t)[0].s - perturbed_curvature(metric, h, -e, t)[0].s) / (2 * e)


def _d_de(F, e):
    """Fourth-order centered derivative at 0 of ``F(e)``."""
    return (8 * (F(e) - F(-e)) - (F(2 * e) - F(-2 * e))) / (12 * e)


def fd_Z2(metric, h, e=2.5e-4, panels=8, order=16):
    """``d/de Z^2(g + e h)`` by finite differences on a fixed quadrature."""
    nodes, weights = quadrature.gauss_legendre_nodes(*h.support, panels, order)

    def Z2(eps):
        pt, dv = perturbed_curvature(metric, h, eps, nodes)
        return float(np.dot(weights, pt.znorm2 * dv))
    return _d_de(Z2, e)


def fd_weighted_scalar(metric, h, weight, e=2.5e-4, panels=8, order=16):
    """``int weight * L(h) dV`` with ``L(h)`` from finite differences of s."""
    nodes, weights = quadrature.gauss_legendre_nodes(*h.support, panels, order)
    w = weight(nodes) * metric.volume_density(nodes)

    def S(eps):
        return float(np.dot(weights * w, perturbed_curvature(metric, h, eps, nodes)[0].s))
    return _d_de(S, e)


def pairing(field_, h, metric, panels=8, order=16):
    """``int <E, h> dV`` for a diagonal field E."""
    nodes, weights = quadrature.gauss_legendre_nodes(*h.support, panels, order)
    vals = np.sum(field_(nodes) * h.values(nodes), axis=0)
    return float(np.dot(weights, vals * metric.volume_density(nodes)))


# ---------------------------------------------------------------------------
# Euler-Lagrange residuals
# ---------------------------------------------------------------------------


@dataclass
class ELResidual:
    """Residuals of one Euler-Lagrange system on an evaluation grid.

    ``pointwise`` has shape ``(3, n)``; ``trace`` is the dedicated trace
    equation; ``weak`` pairs each basket perturbation with its variational
    (finite-difference) residual and ``weak_pairing`` with ``int <E, h> dV``.
    """

    system: str
    grid: np.ndarray
    pointwise: np.ndarray
    trace: np.ndarray
    weak: list = field(default_factory=list)
    weak_pairing: list = field(default_factory=list)
    weak_scale: float = 0.0
    term_scale: float = 0.0
    diagnostics: dict = field(default_factory=dict)

    @property
    def sup(self):
        return float(np.max(np.abs(self.pointwise)))

    @property
    def trace_sup(self):
        return float(np.max(np.abs(self.trace)))

    @property
    def trace_mismatch(self):
        """Disagreement between the tensor trace and the trace equation, relative to the term sizes.

        The scale is floored by ``|Rm|^2`` so that systems whose terms all
        vanish (Einstein metrics) are not measured against roundoff.
        """
        tensor = self.pointwise.sum(axis=0)
        scale = max(self.term_scale, self.diagnostics.get("curvature_scale", 0.0), 1e-300)
        return float(np.max(np.abs(tensor - self.trace)) / scale)

    @property
    def weak_sup(self):
        return max((abs(v) for _, v in self.weak), default=0.0)


def _coefficients(system, potential, alpha, eps, c, metric):
    """Return ``(a, tau, chi_const, eps_for_chi)`` for the residual tensor."""
    if system not in SYSTEMS:
        raise InputError(f"unknown system {system!r}; choose from {SYSTEMS}")
    if isinstance(potential, RadialProfile):
        potential = PotentialField.given(potential, alpha or 0.0, eps or 0.0)
    if system == "Z2sys":
        return 1.0, None, None
    if potential is None:
        raise InputError(f"{system} needs a potential")
    if system in ("Zc2", "Zs2"):
        a = alpha if alpha is not None else potential.alpha
        if a is None or a <= 0:
            raise InputError(f"{system} needs alpha > 0")
        return a, potential.tau, None
    if system == "StaticVacuum":
        return 0.0, potential.tau, None
    e = eps if eps is not None else potential.eps
    if e is None or e <= 0:
        raise InputError("FullIepsEL needs eps > 0")
    if c is None:
        c = functional_report(metric, e).c_const
    return e, potential.tau, c


def el_residual(system, metric, potential=None, *, alpha=None, eps=None, c=None,
                grid=None, basket=None, weak=True):
    """Pointwise, trace and weak residuals of ``system`` on ``metric``.

    Parameters
    ----------
    system : str
        One of ``Z2sys, Zc2, Zs2, StaticVacuum, FullIepsEL``.
    potential : PotentialField or RadialProfile, optional
        Not used by ``Z2sys``.
    alpha, eps : float, optional
        Override the values carried by ``potential``.
    c : float, optional
        Lagrange constant of ``FullIepsEL``; computed from the functional
        report when omitted.
    grid : array_like, optional
        Evaluation points; defaults to 201 interior points.
    basket : list of Perturbation, optional
        Defaults to :func:`make_basket`; ``weak=False`` skips the weak part.
    """
    a, tau, chi_c = _coefficients(system, potential, alpha, eps, c, metric)
    if grid is None:
        lo, hi = metric.domain
        grid = np.linspace(lo, hi, 203)[1:-1]
    grid = np.asarray(grid, dtype=float)

    grad = gradZ2(metric) if a != 0 else None
    lstar = Lstar_apply(tau, metric) if tau is not None else None
    s_prof = ScalarCurvatureProfile(metric)

    def terms(t):
        out = []
        if grad is not None:
            out.append(a * grad(t))
        if lstar is not None:
            out.append(lstar(t))
        if chi_c is not None:
            out.append(np.broadcast_to(s_prof(t) * tau(t) / 4 + chi_c, (3,) + np.shape(t)))
        return out

    def tensor(t):
        return sum(terms(t), np.zeros((3,) + np.shape(t)))

    parts = terms(grid)
    pointwise = sum(parts, np.zeros((3,) + grid.shape))
    term_scale = max(float(np.max(np.abs(p))) for p in parts)
    pt = curvature_at(metric, grid)
    lap_s = laplacian(s_prof, metric, grid)
    if system == "Z2sys":
        trace = -(lap_s + 3 * pt.znorm2) / 6
    elif system == "StaticVacuum":
        trace = -2 * laplacian(tau, metric, grid) - pt.s * tau(grid)
    elif system in ("Zc2", "Zs2"):
        trace = (-2 * (laplacian(tau, metric, grid) + a * lap_s / 12) - a * pt.znorm2 / 2
                 - pt.s * tau(grid))
    else:
        st = pt.s * tau(grid)
        trace = -(2 * (laplacian(tau, metric, grid) + a * lap_s / 12) + st / 4 + a * pt.znorm2 / 2
                  - 3 * chi_c)

    diagnostics = {"curvature_scale": float(np.max(pt.rnorm2))}
    if system == "Zs2":
        diagnostics["s_sup"] = float(np.max(np.abs(pt.s)))
    if tau is not None:
        diagnostics["s_tau_sup"] = float(np.max(np.abs(pt.s * tau(grid))))

    res = ELResidual(system, grid, pointwise, np.asarray(trace, dtype=float), term_scale=term_scale,
                     diagnostics=diagnostics)
    if weak:
        basket = basket if basket is not None else make_basket(metric)
        scale = 0.0
        for h in basket:
            dz = fd_Z2(metric, h) if a != 0 else 0.0
            val = a * dz
            if tau is not None:
                val += fd_weighted_scalar(metric, h, tau)
            if chi_c is not None:
                chi = lambda t: s_prof(t) * tau(t) / 4 + chi_c
                nodes, weights = quadrature.gauss_legendre_nodes(*h.support)
                val += float(np.dot(weights, chi(nodes) * h.trace(nodes) * metric.volume_density(nodes)))
            res.weak.append((h.id, val))
            res.weak_pairing.append((h.id, pairing(tensor, h, metric)))
            scale = max(scale, abs(a * dz))
        res.weak_scale = scale
    return res


# ---------------------------------------------------------------------------
# junction relation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class JunctionField:
    """A one-dimensional Z_c^2 test configuration with a junction at ``t_j``.

    ``omega(t) = (t - t_j) exp(t/2)`` is smooth; on the left ``s < 0`` and
    ``tau = s/sigma`` so ``s = omega / (1/sigma + eps/12)``; on the right
    ``tau = 0`` and ``s = 12 omega / eps``.  Both ``tau`` and ``s`` jump in
    slope at ``t_j``.
    """

    eps: float = 0.1
    sigma: float = 2.0
    t_j: float = 0.7

    def omega(self, t):
        return (t - self.t_j) * np.exp(t / 2)

    def s_left(self, t):
        return self.omega(t) / (1 / self.sigma + self.eps / 12)

    def s_right(self, t):
        return 12 * self.omega(t) / self.eps

    def tau_left(self, t):
        return self.s_left(t) / self.sigma


_ONE_SIDED = np.array([25.0, -48.0, 36.0, -16.0, 3.0]) / 12.0


def junction_relation(fld, h):
    """One-sided 5-point limits ``(grad^-(tau + eps s/12), (eps/12) grad^+ s)`` at the junction."""
    left = np.array([fld.tau_left(fld.t_j - j * h) + fld.eps * fld.s_left(fld.t_j - j * h) / 12
                     for j in range(5)])
    right = np.array([fld.s_right(fld.t_j + j * h) for j in range(5)])
    lhs = float(np.dot(_ONE_SIDED, left)) / h
    rhs = -fld.eps / 12 * float(np.dot(_ONE_SIDED, right)) / h
    return lhs, rhs
