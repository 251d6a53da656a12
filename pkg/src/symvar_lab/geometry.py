"""Symmetric 3-metrics and their pointwise curvature.

Two warped-product shapes are in scope, always in arclength form::

    SphereWarped:  dt^2 + f(t)^2 g_{S^2(1)}
    TorusWarped:   dt^2 + f1(t)^2 dtheta1^2 + f2(t)^2 dtheta2^2

Curvature is reported in the orthonormal frame (d_t, fiber1, fiber2).  Sign
convention: the round unit sphere has sectional curvature +1 and Ricci is
the sum of sectional curvatures.
"""

import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize

from .errors import (
    ConversionError,
    DegeneracyError,
    DomainError,
    InputError,
    NumericError,
    ReflectionError,
)
from .profiles import MAX_ORDER, ClosedFormProfile, RadialProfile, ReflectedProfile

SPHERE = "sphere"
TORUS = "torus"
DEGENERACY_CUTOFF = 1e-12


@dataclass(frozen=True)
class CurvaturePoint:
    """Pointwise curvature package (fields are floats or equal-shape arrays)."""

    K12: object
    K13: object
    K23: object

    @property
    def ric1(self):
        return self.K12 + self.K13

    @property
    def ric2(self):
        return self.K12 + self.K23

    @property
    def ric3(self):
        return self.K13 + self.K23

    @property
    def ricci(self):
        return (self.ric1, self.ric2, self.ric3)

    @property
    def s(self):
        return 2 * (self.K12 + self.K13 + self.K23)

    @property
    def z(self):
        third = self.s / 3
        return tuple(r - third for r in self.ricci)

    @property
    def z1(self):
        return self.z[0]

    @property
    def z2(self):
        return self.z[1]

    @property
    def z3(self):
        return self.z[2]

    @property
    def znorm2(self):
        return sum(zi**2 for zi in self.z)

    @property
    def rnorm2(self):
        return sum(r**2 for r in self.ricci)

    def as_dict(self):
        keys = ("K12", "K13", "K23", "ric1", "ric2", "ric3", "s", "z1", "z2", "z3", "znorm2", "rnorm2")
        return {k: getattr(self, k) for k in keys}


@dataclass(frozen=True)
class SymmetricMetric:
    """Warped-product 3-metric; build with :meth:`sphere` or :meth:`torus`."""

    kind: str
    profiles: tuple
    domain: tuple

    @classmethod
    def sphere(cls, f):
        return cls(SPHERE, (f,), f.domain)

    @classmethod
    def torus(cls, f1, f2):
        lo = max(f1.domain[0], f2.domain[0])
        hi = min(f1.domain[1], f2.domain[1])
        if not lo < hi:
            raise InputError("torus warping functions have disjoint domains")
        return cls(TORUS, (f1, f2), (lo, hi))

    @property
    def f(self):
        return self.profiles[0]

    @property
    def length(self):
        return self.domain[1] - self.domain[0]

    def check(self, t):
        t = np.asarray(t, dtype=float)
        slack = 1e-12 * max(1.0, self.length)
        if np.any(t < self.domain[0] - slack) or np.any(t > self.domain[1] + slack):
            raise DomainError(f"t outside metric domain {self.domain}")
        return t

    def warps(self, t):
        """Warping values at ``t``, with the degeneracy cutoff enforced."""
        t = self.check(t)
        vals = [p(t) for p in self.profiles]
        floor = DEGENERACY_CUTOFF * self.length
        for v in vals:
            if np.any(np.asarray(v) < floor):
                raise DegeneracyError("warping function below degeneracy cutoff")
        return vals

    def jets(self, t, order=MAX_ORDER):
        """Flat list of derivative stacks, the argument layout of the kernels."""
        self.warps(t)
        return [d for p in self.profiles for d in p.jet(t, order)]

    def volume_density(self, t):
        """dV/dt for the symmetric metric (angles integrated out)."""
        vals = self.warps(t)
        if self.kind == SPHERE:
            return 4 * np.pi * vals[0] ** 2
        return 4 * np.pi**2 * vals[0] * vals[1]

    def mean_curvature(self, t):
        """Sum of f_i'/f_i, so that Lap u = u'' + H u' for radial u."""
        if self.kind == SPHERE:
            f = self.f
            return 2 * f.deriv(t, 1) / f(t)
        return sum(p.deriv(t, 1) / p(t) for p in self.profiles)

    def scaled(self, lam):
        """The homothetic metric lam^2 g (arclength and warps scale by lam)."""

        def scale(p):
            fns = [lambda t, k=k: lam ** (1 - k) * p.deriv(t / lam, k) for k in range(p.max_order + 1)]
            return ClosedFormProfile(fns, (lam * p.domain[0], lam * p.domain[1]))

        return SymmetricMetric(self.kind, tuple(scale(p) for p in self.profiles),
                               (lam * self.domain[0], lam * self.domain[1]))


def _sectional(kind, jets):
    if kind == SPHERE:
        f, f1, f2 = jets[:3]
        krad = -f2 / f
        return CurvaturePoint(krad, krad, (1 - f1**2) / f**2)
    p, p1, p2 = jets[0:3]
    q, q1, q2 = jets[3:6]
    return CurvaturePoint(-p2 / p, -q2 / q, -p1 * q1 / (p * q))


def curvature_at(metric, t):
    """Curvature of ``metric`` at arclength ``t`` from analytic derivatives.

    Uses K_rad = -f''/f and K_fiber = (1 - f'^2)/f^2 (sphere) or
    -f1' f2'/(f1 f2) (torus).
    """
    metric.warps(t)
    jets = [d for p in metric.profiles for d in p.jet(t, 2)]
    return _sectional(metric.kind, jets)


def _stencil(p, t, h, k):
    fm2, fm1, f0, fp1, fp2 = (p(t + j * h) for j in (-2, -1, 0, 1, 2))
    if k == 0:
        return f0
    if k == 1:
        return (fm2 - 8 * fm1 + 8 * fp1 - fp2) / (12 * h)
    return (-fm2 + 16 * fm1 - 30 * f0 + 16 * fp1 - fp2) / (12 * h**2)


def curvature_oracle(metric, t, h):
    """Independent curvature from 5-point stencils of the warping values only."""
    t = np.asarray(t, dtype=float)
    lo, hi = metric.domain
    if np.any(t - 2 * h < lo) or np.any(t + 2 * h > hi):
        raise DomainError("stencil leaves the metric domain")
    metric.warps(t)
    jets = [_stencil(p, t, h, k) for p in metric.profiles for k in range(3)]
    return _sectional(metric.kind, jets)


def diagonal_curvature(kind, A, B1, B2=None):
    """Curvature of ``A dt^2 + B1 e1^2 + B2 e2^2`` (not necessarily arclength).

    ``A`` is a jet ``(A, A')``; ``B1``/``B2`` are jets ``(B, B', B'')``.  For
    the sphere shape the fiber is the round unit 2-sphere and ``B2`` is taken
    equal to ``B1``.  Returns ``(CurvaturePoint, dV/dt)``.
    """
    a = np.sqrt(A[0])
    a1 = A[1] / (2 * a)

    def arclength_jet(B):
        b = np.sqrt(B[0])
        b1 = B[1] / (2 * b)
        b2 = (B[2] - 2 * b1**2) / (2 * b)
        bd = b1 / a
        bdd = (b2 * a - b1 * a1) / a**3
        return b, bd, bdd

    b, bd, bdd = arclength_jet(B1)
    if kind == SPHERE:
        pt = CurvaturePoint(-bdd / b, -bdd / b, (1 - bd**2) / b**2)
        return pt, 4 * np.pi * a * b**2
    c, cd, cdd = arclength_jet(B2)
    pt = CurvaturePoint(-bdd / b, -cdd / c, -bd * cd / (b * c))
    return pt, 4 * np.pi**2 * a * b * c


class ParametricProfile(RadialProfile):
    """Warping function ``f(t) = r`` of an area-radius metric ``A(r) dr^2 + r^2 g_S2``.

    Arclength is ``t(r) = int_{r0}^r sqrt(A)``; the integral is taken in the
    variable ``w = sqrt(r - r0)``, which removes an ``A ~ C/(r - r0)`` endpoint
    singularity.  Derivatives follow from ``d/dt = A^{-1/2} d/dr``.
    """

    def __init__(self, A, r_range, dA=None, rel_tol=1e-11, nodes=64):
        self.A = A
        self.r0, self.r1 = float(r_range[0]), float(r_range[1])
        if not self.r0 < self.r1:
            raise InputError("empty r-range")
        self.dA = list(dA) if dA is not None else None
        self.rel_tol = rel_tol
        self._scale = max(self.r1 - self.r0, 1.0)
        self._check_integrable()
        w_nodes = np.linspace(0.0, np.sqrt(self.r1 - self.r0), nodes)
        t_nodes = [0.0]
        for wa, wb in zip(w_nodes[:-1], w_nodes[1:]):
            t_nodes.append(t_nodes[-1] + self._segment(wa, wb))
        self._w = w_nodes
        self._t = np.array(t_nodes)
        super().__init__((0.0, self._t[-1]))

    def _dt_dw(self, w):
        r = self.r0 + w * w
        with np.errstate(divide="ignore", invalid="ignore"):
            return 2 * w * np.sqrt(self.A(r))

    def _check_integrable(self):
        e = 1e-8 * (self.r1 - self.r0)
        a1, a2 = float(self.A(self.r0 + e)), float(self.A(self.r0 + 2 * e))
        if not (np.isfinite(a1) and np.isfinite(a2)) or a1 <= 0 or a2 <= 0:
            raise ConversionError("A is not positive near the left endpoint")
        power = np.log(a1 / a2) / np.log(2.0)
        if power >= 2 - 1e-3:
            raise ConversionError(f"non-integrable endpoint singularity (A ~ (r-r0)^-{power:.3f})")

    def _segment(self, wa, wb):
        # roundoff in A near r0 limits what QUADPACK can certify; judge by the error estimate
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            val, err = integrate.quad(self._dt_dw, wa, wb, epsabs=1e-15 * self._scale,
                                      epsrel=self.rel_tol, limit=200)
        if err > 1e-8 * max(abs(val), 1e-300) + 1e-14 * self._scale:
            raise NumericError("arclength quadrature did not converge", achieved=err)
        return val

    def t_of_r(self, r):
        r = np.atleast_1d(np.asarray(r, dtype=float))
        out = np.empty_like(r)
        for i, ri in enumerate(r):
            w = np.sqrt(max(ri - self.r0, 0.0))
            k = max(np.searchsorted(self._w, w) - 1, 0)
            out[i] = self._t[k] + self._segment(self._w[k], w)
        return out if out.size > 1 else float(out[0])

    def r_of_t(self, t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.empty_like(t)
        for i, ti in enumerate(t):
            if ti <= 0:
                out[i] = self.r0
                continue
            k = max(np.searchsorted(self._t, ti) - 1, 0)
            bracket = (self._w[k], self._w[min(k + 1, self._w.size - 1)])
            fn = lambda w: self._t[k] + self._segment(self._w[k], w) - ti
            if bracket[0] == bracket[1] or fn(bracket[1]) <= 0:
                w = bracket[1]
            else:
                w = optimize.brentq(fn, bracket[0], bracket[1], xtol=1e-15, rtol=1e-15)
            out[i] = self.r0 + w * w
        return out

    def _A_jet(self, r):
        if self.dA is not None:
            return [self.A(r)] + [d(r) for d in self.dA[:3]]
        h = 1e-3 * np.minimum(r - self.r0, 1.0) + 1e-12
        vals = [self.A(r + j * h) for j in (-2, -1, 0, 1, 2)]
        d1 = (vals[0] - 8 * vals[1] + 8 * vals[3] - vals[4]) / (12 * h)
        d2 = (-vals[0] + 16 * vals[1] - 30 * vals[2] + 16 * vals[3] - vals[4]) / (12 * h**2)
        d3 = (-vals[0] + 2 * vals[1] - 2 * vals[3] + vals[4]) / (2 * h**3)
        return [vals[2], d1, d2, d3]

    def _deriv(self, t, k):
        scalar = np.ndim(t) == 0
        r = self.r_of_t(t)
        if k == 0:
            return float(r[0]) if scalar else r
        A, A1, A2, A3 = self._A_jet(r)
        w = A**-0.5
        w1 = -0.5 * A**-1.5 * A1
        w2 = 0.75 * A**-2.5 * A1**2 - 0.5 * A**-1.5 * A2
        w3 = -1.875 * A**-3.5 * A1**3 + 2.25 * A**-2.5 * A1 * A2 - 0.5 * A**-1.5 * A3
        out = [None, w, w * w1, w * (w1**2 + w * w2), w * (w1**3 + 4 * w * w1 * w2 + w**2 * w3)][k]
        return float(out[0]) if scalar else out


def arclength_form(A, r_range, dA=None):
    """Convert ``A(r) dr^2 + r^2 g_S2`` to a SphereWarped metric in arclength form.

    Parameters
    ----------
    A : callable
        Positive on the open r-range; ``A ~ C/(r - r0)`` is allowed at the
        left endpoint.
    r_range : tuple of float
    dA : sequence of callables, optional
        ``A', A'', A'''``; when omitted they are taken by 5-point stencils.

    Returns
    -------
    SymmetricMetric
        With ``t(r_left) = 0`` and ``f(t(r)) = r``.
    """
    return SymmetricMetric.sphere(ParametricProfile(A, r_range, dA))


def double_across_horizon(metric, tol=1e-6):
    """Even reflection of a SphereWarped metric through its core ``t = 0``.

    Raises
    ------
    ReflectionError
        If ``|f'(0)| > tol`` (core not totally geodesic).
    """
    if metric.kind != SPHERE:
        raise InputError("only SphereWarped metrics can be doubled")
    if abs(metric.domain[0]) > 1e-14:
        raise InputError("doubling needs the core at t = 0")
    slope = metric.f.deriv(0.0, 1)
    if abs(slope) > tol:
        raise ReflectionError(f"core not totally geodesic: f'(0) = {slope:.3g}")
    return SymmetricMetric.sphere(ReflectedProfile(metric.f))
