"""Model metrics: constant-curvature ODE caps glued to hyperbolic bulk.

A cap is a SphereWarped profile with a minimal core sphere of radius
``delta`` (``f(0) = delta``, ``f'(0) = 0``) solving one of

    hyperbolic:    f'^2 = 1 + f^2 - (delta + delta^3)/f     (s = -6)
    schwarzschild: f'^2 = 1 - delta/f                        (s = 0)

Both are integrated in second-order form ``f'' = F(f)``, which is regular at
the core; a short Taylor series supplies the start.  Beyond the cap radius
``mu = delta^(1/3)`` the profile is bent onto ``sinh(t + t0)`` (hyperbolic) or
``t + t0`` (flat) over ``[mu/2, mu]`` with a quintic smoothstep, and the rest
of the manifold is represented by closed-form bulk integrals.
"""

from dataclasses import dataclass, field
from math import comb

import numpy as np
from scipy import integrate

from . import quadrature
from .canonical import SchwarzschildProfile
from .errors import AssemblyError, InputError, NumericError, ScanError
from .functionals import FunctionalReport, bulk_integrals, integrals
from .geometry import SymmetricMetric, curvature_at
from .profiles import RadialProfile, ReflectedProfile

ODE_RTOL = 1e-12
C_BLEND = 25.0
S_BULK = -6.0


class _CapField:
    """Right-hand side ``F(f)`` of ``f'' = F(f)`` with two derivatives and the first integral."""

    def __init__(self, kind, delta):
        self.kind = kind
        self.delta = delta
        if kind == "hyperbolic":
            k = delta + delta**3
            self.F = lambda f: f + 0.5 * k / f**2
            self.dF = lambda f: 1 - k / f**3
            self.d2F = lambda f: 3 * k / f**4
            self.first_integral = lambda f: 1 + f * f - k / f
            self.s_target = -6.0
        elif kind == "schwarzschild":
            self.F = lambda f: 0.5 * delta / f**2
            self.dF = lambda f: -delta / f**3
            self.d2F = lambda f: 3 * delta / f**4
            self.first_integral = lambda f: 1 - delta / f
            self.s_target = 0.0
        else:
            raise InputError(f"unknown cap kind {kind!r}")


class CapProfile(RadialProfile):
    """Numerical cap profile on ``[0, t_end]``.

    ``f`` and ``f'`` come from the integrator's dense output; ``f''`` and
    higher from the ODE itself, so the profile has a full 4-jet.
    """

    source = "ode"

    def __init__(self, kind, delta, t_end, t_start=None, rtol=ODE_RTOL):
        if delta <= 0:
            raise InputError("delta must be positive")
        super().__init__((0.0, float(t_end)))
        self.kind = kind
        self.delta = float(delta)
        self.ode = _CapField(kind, self.delta)
        mu = self.delta ** (1 / 3)
        # the series is in t/delta, keep that ratio small as well
        self.t_start = t_start if t_start is not None else 1e-3 * min(mu, self.delta)
        d, ode = self.delta, self.ode
        F0, F1, F2 = ode.F(d), ode.dF(d), ode.d2F(d)
        self._series = np.polynomial.Polynomial(
            [d, 0, F0 / 2, 0, F1 * F0 / 24, 0, (3 * F2 * F0**2 + F1**2 * F0) / 720])
        y0 = [self._series(self.t_start), self._series.deriv()(self.t_start)]
        sol = integrate.solve_ivp(lambda t, y: [y[1], ode.F(y[0])], (self.t_start, t_end), y0,
                                  method="RK45", rtol=rtol, atol=[1e-14 * d, 1e-14],
                                  dense_output=True)
        if not sol.success:
            raise NumericError(f"cap integration failed: {sol.message}")
        self._sol = sol.sol
        self.nfev = sol.nfev

    def _fd(self, t):
        t = np.asarray(t, dtype=float)
        early = t < self.t_start
        y = self._sol(np.where(early, self.t_start, t))
        f = np.where(early, self._series(t), y[0])
        fp = np.where(early, self._series.deriv()(t), y[1])
        return f, fp

    def _deriv(self, t, k):
        f, fp = self._fd(t)
        ode = self.ode
        if k == 0:
            out = f
        elif k == 1:
            out = fp
        elif k == 2:
            out = ode.F(f)
        elif k == 3:
            out = ode.dF(f) * fp
        else:
            out = ode.d2F(f) * fp**2 + ode.dF(f) * ode.F(f)
        return float(out) if np.ndim(out) == 0 else out

    def ode_residual(self, t):
        """``|f'^2 - RHS(f)|`` along the solution."""
        f, fp = self._fd(t)
        return np.abs(fp**2 - self.ode.first_integral(f))


def solve_cap_hyperbolic(delta, t_end=None):
    """Constant ``s = -6`` cap with core radius ``delta`` (``0 < delta < 0.3``)."""
    if not 0 < delta < 0.3:
        raise InputError("hyperbolic cap needs 0 < delta < 0.3")
    return CapProfile("hyperbolic", delta, t_end if t_end is not None else 1.5 * delta ** (1 / 3))


def solve_cap_schwarzschild(delta, t_end=None):
    """Scalar-flat cap: the Schwarzschild exterior of mass ``delta/2``."""
    if delta <= 0:
        raise InputError("delta must be positive")
    return CapProfile("schwarzschild", delta, t_end if t_end is not None else 5.0 * max(delta, 1.0))


# ---------------------------------------------------------------------------
# blending
# ---------------------------------------------------------------------------

_SMOOTH = np.polynomial.Polynomial([0, 0, 0, 10, -15, 6])


class _Outer(RadialProfile):
    """``sinh(t + t0)`` or ``t + t0``."""

    def __init__(self, kind, shift, domain):
        super().__init__(domain)
        self.kind = kind
        self.shift = shift

    def _deriv(self, t, k):
        x = np.asarray(t) + self.shift
        if self.kind == "hyperbolic":
            out = np.sinh(x) if k % 2 == 0 else np.cosh(x)
        else:
            out = [x, np.ones_like(x)][k] if k < 2 else np.zeros_like(x)
        return float(out) if np.ndim(out) == 0 else out


class BlendedProfile(RadialProfile):
    """``(1 - w) cap + w outer`` on the window, cap before it, outer after it."""

    def __init__(self, cap, outer, window, domain):
        super().__init__(domain)
        self.cap, self.outer = cap, outer
        self.a, self.b = window
        self.source = cap.source

    def _weights(self, t, k):
        L = self.b - self.a
        x = np.clip((np.asarray(t) - self.a) / L, 0.0, 1.0)
        return _SMOOTH.deriv(k)(x) / L**k if k else _SMOOTH(x)

    def _deriv(self, t, k):
        t = np.asarray(t, dtype=float)
        inner = t < self.b
        cap_t = np.where(inner, t, self.a)
        out = np.zeros_like(t)
        for j in range(k + 1):
            wj = self._weights(t, j)
            diff = self.outer.deriv(t, k - j) - np.where(inner, self.cap.deriv(cap_t, k - j), 0.0)
            out = out + comb(k, j) * wj * diff
        out = out + np.where(inner, self.cap.deriv(cap_t, k), 0.0)
        return float(out) if out.ndim == 0 else out


def hyperbolic_ball_volume(R):
    """Volume of a geodesic ball of radius R in hyperbolic 3-space."""
    return np.pi * (np.sinh(2 * R) - 2 * R)


@dataclass
class ModelAssembly:
    """One side (or the doubled pair) of a glued model manifold.

    ``profile`` is the blended SphereWarped profile on ``[0, mu]``; beyond
    ``mu`` the metric is the bulk, represented only by its integrals.
    """

    delta: float
    cap_kind: str
    cap_profile: CapProfile
    profile: RadialProfile
    mu: float
    window: tuple
    shift: float
    bulk_volumes: tuple
    doubled: bool
    blend_curvature: float
    diagnostics: dict = field(default_factory=dict)

    @property
    def metric(self):
        """The glued region as a SphereWarped metric (doubled through the core when requested)."""
        if self.doubled:
            return SymmetricMetric.sphere(ReflectedProfile(self.profile))
        return SymmetricMetric.sphere(self.profile)

    @property
    def bulk(self):
        kind = "hyperbolic" if self.cap_kind == "hyperbolic" else "none"
        return {"kind": kind, "volumes": self.bulk_volumes, "s_bulk": S_BULK if kind == "hyperbolic" else 0.0}

    def cut_volume(self):
        """Bulk volume removed per side to make room for the cap."""
        if self.cap_kind != "hyperbolic":
            return 0.0
        return hyperbolic_ball_volume(self.mu + self.shift)

    def integrals(self, rel_tol=quadrature.REL_TOL):
        """Total ``(vol, int|z|^2, int(s^-)^2)`` over the assembled manifold."""
        metric = SymmetricMetric.sphere(self.profile)
        marks = sorted({min(10 * self.delta, self.mu / 4), self.window[0]})
        cap = integrals(metric, (0.0, self.mu), rel_tol=rel_tol, points=marks)
        sides = 2 if self.doubled else 1
        total = cap.scaled(sides)
        if self.cap_kind == "hyperbolic":
            for V in self.bulk_volumes[:sides]:
                total = total + bulk_integrals(V - self.cut_volume(), S_BULK)
        return total

    @property
    def floor(self):
        """S^-2 of the pure hyperbolic bulk, ``6 (V1 + V2)^(2/3)``."""
        if self.cap_kind != "hyperbolic":
            return 0.0
        sides = 2 if self.doubled else 1
        return -S_BULK * sum(self.bulk_volumes[:sides]) ** (2 / 3)

    def report(self, eps, ints=None):
        return FunctionalReport.from_integrals(ints if ints is not None else self.integrals(), eps)


def _blend_curvature(metric, window, n=201):
    t = np.linspace(window[0], window[1], n)
    pt = curvature_at(metric, t)
    return float(np.max(np.abs(pt.ricci)))


def assemble_model(delta, cap_kind="hyperbolic", bulk_volumes=(1.0, 1.0), doubled=True):
    """Glue a cap of core radius ``delta`` into the bulk.

    Raises
    ------
    AssemblyError
        If the blend makes ``f`` non-positive, its Ricci curvature exceeds
        ``10 * C_BLEND``, or the bulk cannot host the removed hyperbolic ball.
    """
    if any(V <= 0 for V in bulk_volumes):
        raise InputError("bulk volumes must be positive")
    mu = delta ** (1 / 3)
    cap = (solve_cap_hyperbolic if cap_kind == "hyperbolic" else solve_cap_schwarzschild)(delta, 1.2 * mu)
    f_mu = cap(mu)
    if cap_kind == "hyperbolic":
        shift = float(np.arcsinh(f_mu) - mu)
        outer_kind = "hyperbolic"
    else:
        shift = float(f_mu - mu)
        outer_kind = "flat"
    window = (mu / 2, mu)
    outer = _Outer(outer_kind, shift, (0.0, 1.2 * mu))
    profile = BlendedProfile(cap, outer, window, (0.0, mu))
    t = np.linspace(0.0, mu, 401)
    if np.any(profile(t) <= 0):
        raise AssemblyError("blend produced a non-positive warping function")
    kappa = _blend_curvature(SymmetricMetric.sphere(profile), window)
    if kappa > 10 * C_BLEND:
        raise AssemblyError(f"blend curvature {kappa:.3g} exceeds 10 x C_BLEND")
    if sum(bulk_volumes[:2 if doubled else 1]) <= 2 * hyperbolic_ball_volume(mu + shift):
        raise AssemblyError("bulk too small to host the cap")
    return ModelAssembly(delta, cap_kind, cap, profile, mu, window, shift, tuple(bulk_volumes),
                         doubled, kappa)


def cap_deviations(cap, n=401):
    """``(max |s - s_target|, max ODE residual / (1 + f^2))`` over the cap domain."""
    t = np.linspace(*cap.domain, n)
    s = curvature_at(SymmetricMetric.sphere(cap), t).s
    f = cap(t)
    return float(np.max(np.abs(s - cap.ode.s_target))), float(np.max(cap.ode_residual(t) / (1 + f * f)))


def schwarzschild_cap_error(delta=1.0, t_max=5.0, n=501):
    """Sup distance on ``[0, t_max]`` between the scalar-flat cap and Schwarzschild of mass ``delta/2``."""
    cap = solve_cap_schwarzschild(delta, t_end=t_max)
    exact = SchwarzschildProfile(delta / 2, r_max=10 * (t_max + delta))
    t = np.linspace(0.0, t_max, n)
    return float(np.max(np.abs(cap(t) - exact(t))))


def volume_fidelity(delta):
    """``(vol_cap B(mu) - vol_hyp B(mu)) / delta`` for the hyperbolic cap."""
    cap = solve_cap_hyperbolic(delta)
    mu = cap.delta ** (1 / 3)
    vol = 4 * np.pi * quadrature.adaptive(lambda t: cap(t) ** 2, 0.0, mu, rel_tol=1e-12,
                                          points=[min(10 * delta, mu / 2)])
    return (vol - hyperbolic_ball_volume(mu)) / delta


def blend_jumps(assembly, rel_step=3e-4):
    """Largest relative jump of ``f, f', f''`` at the blend endpoints.

    Derivatives come from one-sided five-point stencils on profile values
    (left and right of each endpoint), independently of the profile's own jet.
    """
    mu = assembly.mu
    h = rel_step * mu
    prof = assembly.profile
    far = _Outer("hyperbolic" if assembly.cap_kind == "hyperbolic" else "flat", assembly.shift, (0, 2 * mu))
    # right of mu the profile is the outer function
    right_of = {assembly.window[0]: prof, mu: far}
    d1 = np.array([-25, 48, -36, 16, -3]) / 12
    d2 = np.array([35, -104, 114, -56, 11]) / 12
    worst = 0.0
    for t0 in assembly.window:
        k = np.arange(5)
        left = prof(t0 - k * h)
        right = right_of[t0](t0 + k * h)
        pairs = [(left[0], right[0]), (-d1 @ left / h, d1 @ right / h), (d2 @ left / h**2, d2 @ right / h**2)]
        for lv, rv in pairs:
            worst = max(worst, abs(lv - rv) / max(abs(lv), abs(rv), 1.0))
    return float(worst)


def peak_curvature(assembly, n=2001):
    """``(max |ric|, location)`` over the glued region ``[0, mu]``."""
    t = np.concatenate([np.linspace(0.0, assembly.mu, n), [0.0]])
    ric = np.max(np.abs(curvature_at(SymmetricMetric.sphere(assembly.profile), t).ricci), axis=0)
    k = int(np.argmax(ric))
    return float(ric[k]), float(t[k])


# ---------------------------------------------------------------------------
# scaling scan
# ---------------------------------------------------------------------------


@dataclass
class ScalingFit:
    """Minimizers ``delta*(eps)`` of ``I_eps^-`` over a delta grid and their power laws."""

    eps: np.ndarray
    delta_star: np.ndarray
    I_star: np.ndarray
    gap: np.ndarray
    floor: float
    p_delta: float
    p_gap: float
    residual_delta: float
    residual_gap: float
    intercepts: tuple
    unimodal: np.ndarray
    table: np.ndarray = field(repr=False, default=None)

    def rows(self):
        return [(e, d, i, g) for e, d, i, g in zip(self.eps, self.delta_star, self.I_star, self.gap)]


def log_grid(lo, hi, count):
    return np.logspace(np.log10(lo), np.log10(hi), count)


def power_law(x, y):
    """OLS fit of ``log y = p log x + c``; returns ``(p, c, rms residual)``."""
    lx, ly = np.log(np.asarray(x)), np.log(np.asarray(y))
    A = np.vstack([lx, np.ones_like(lx)]).T
    (p, c), *_ = np.linalg.lstsq(A, ly, rcond=None)
    resid = ly - A @ np.array([p, c])
    return float(p), float(c), float(np.sqrt(np.mean(resid**2)))


def is_unimodal(values, rtol=1e-12):
    """Decreasing then increasing, up to a relative tolerance."""
    v = np.asarray(values)
    k = int(np.argmin(v))
    tol = rtol * np.max(np.abs(v))
    return bool(np.all(np.diff(v[:k + 1]) <= tol) and np.all(np.diff(v[k:]) >= -tol))


def scan_scaling(eps_grid, delta_grid, bulk_volumes=(1.0, 1.0), doubled=True, map_fn=map,
                 rel_tol=quadrature.REL_TOL):
    """Tabulate ``I_eps^-(h_delta)`` on the grids and fit the minimizer scaling.

    Integrals depend on delta only, so each model is assembled once; the
    epsilon dependence is algebraic.  ``map_fn`` may be an executor's map
    (results are consumed in grid order).

    Raises
    ------
    ScanError
        If some minimizer sits on the boundary of the delta grid.
    """
    eps_grid = np.asarray(eps_grid, dtype=float)
    delta_grid = np.asarray(delta_grid, dtype=float)
    for g, name in ((eps_grid, "eps"), (delta_grid, "delta")):
        if g.size < 3 or np.any(np.diff(g) <= 0):
            raise InputError(f"{name} grid must be increasing with >= 3 points")

    def one(delta):
        return assemble_model(delta, "hyperbolic", bulk_volumes, doubled).integrals(rel_tol)

    ints = list(map_fn(one, delta_grid))
    table = np.array([[FunctionalReport.from_integrals(I, e).I_eps_minus for I in ints] for e in eps_grid])
    floor = -S_BULK * sum(bulk_volumes[:2 if doubled else 1]) ** (2 / 3)
    idx = np.argmin(table, axis=1)
    bad = [float(eps_grid[i]) for i, k in enumerate(idx) if k in (0, delta_grid.size - 1)]
    if bad:
        raise ScanError(f"minimizer on the delta-grid boundary for eps = {bad}")
    d_star = delta_grid[idx]
    I_star = table[np.arange(eps_grid.size), idx]
    gap = I_star - floor
    inner = slice(1, -1)
    p_d, c_d, r_d = power_law(eps_grid[inner], d_star[inner])
    p_g, c_g, r_g = power_law(eps_grid[inner], gap[inner])
    unimodal = np.array([is_unimodal(row) for row in table])
    return ScalingFit(eps_grid, d_star, I_star, gap, floor, p_d, p_g, r_d, r_g,
                      (float(np.exp(c_d)), float(np.exp(c_g))), unimodal, table)
