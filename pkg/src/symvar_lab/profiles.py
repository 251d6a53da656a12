"""Radial profiles: scalar functions of arclength with derivative access.

A profile is the substrate of every metric and potential in the lab.  All
profiles expose ``deriv(t, k)`` for ``k = 0..4`` (raising
:class:`~symvar_lab.errors.NumericError` when an order is unavailable) and
accept scalars or numpy arrays.
"""

from math import factorial

import numpy as np
import sympy as sp

from .errors import DomainError, InputError, NumericError

MAX_ORDER = 4


class RadialProfile:
    """Base class; subclasses implement :meth:`_deriv`.

    Parameters
    ----------
    domain : tuple of float
        Closed interval ``(t0, t1)`` with ``t0 < t1``.
    """

    source = "closed-form"
    max_order = MAX_ORDER

    def __init__(self, domain):
        t0, t1 = float(domain[0]), float(domain[1])
        if not t0 < t1:
            raise InputError(f"empty profile domain {domain!r}")
        self.domain = (t0, t1)

    @property
    def length(self):
        return self.domain[1] - self.domain[0]

    def check(self, t):
        t = np.asarray(t, dtype=float)
        slack = 1e-12 * max(1.0, self.length)
        if np.any(t < self.domain[0] - slack) or np.any(t > self.domain[1] + slack):
            raise DomainError(f"t outside profile domain {self.domain}")
        return t

    def deriv(self, t, k=0):
        if not 0 <= k <= self.max_order:
            raise NumericError(f"derivative order {k} unavailable (max {self.max_order})")
        return self._deriv(self.check(t), k)

    def _deriv(self, t, k):
        raise NotImplementedError

    def __call__(self, t):
        return self.deriv(t, 0)

    def jet(self, t, order=MAX_ORDER):
        """List ``[f, f', ..., f^(order)]`` at ``t``."""
        return [self.deriv(t, k) for k in range(order + 1)]


class ClosedFormProfile(RadialProfile):
    """Profile given by explicit derivative callables ``[f, f', f'', ...]``."""

    def __init__(self, derivs, domain, label=""):
        super().__init__(domain)
        self._fns = list(derivs)
        self.max_order = len(self._fns) - 1
        self.label = label

    @classmethod
    def from_expr(cls, expr, domain, var="t"):
        """Build from a sympy expression (or string) in ``var``.

        >>> ClosedFormProfile.from_expr("sin(t)", (0, 3))(0.0)
        0.0
        """
        x = sp.Symbol(var, real=True)
        e = sp.sympify(expr, locals={var: x})
        fns = []
        for k in range(MAX_ORDER + 1):
            dk = sp.diff(e, x, k)
            fn = sp.lambdify(x, dk, modules="numpy")
            fns.append(_broadcasting(fn))
        return cls(fns, domain, label=str(e))

    def _deriv(self, t, k):
        return self._fns[k](t)


def _broadcasting(fn):
    def wrapped(t):
        out = fn(t)
        return np.broadcast_to(out, np.shape(t)).astype(float) if np.ndim(t) else float(out)
    return wrapped


class GridProfile(RadialProfile):
    """Profile sampled on a uniform grid.

    Derivatives come from the local degree-4 interpolant through the five
    nearest nodes; at nodes this is the 5-point stencil (centered in the
    interior, one-sided at the two nodes next to each boundary).  Accuracy is
    O(h^4) for f, O(h^3..h^4) for f', and degrades by one order per further
    derivative; f'''' is only O(h) accurate.
    """

    source = "grid"

    def __init__(self, grid, values):
        grid = np.asarray(grid, dtype=float)
        values = np.asarray(values, dtype=float)
        if grid.ndim != 1 or grid.size < 5 or grid.shape != values.shape:
            raise InputError("grid profile needs >= 5 matching samples")
        steps = np.diff(grid)
        if np.any(steps <= 0):
            raise InputError("grid must be strictly increasing")
        if np.ptp(steps) > 1e-9 * steps.mean():
            raise InputError("grid must be uniform")
        super().__init__((grid[0], grid[-1]))
        self.grid = grid
        self.values = values
        self.h = steps.mean()
        nodes = np.arange(5.0)
        self._vinv = np.linalg.inv(np.vander(nodes, 5, increasing=True))

    def _deriv(self, t, k):
        scalar = np.ndim(t) == 0
        t = np.atleast_1d(t)
        n = self.grid.size
        i0 = np.clip(np.rint((t - self.grid[0]) / self.h).astype(int) - 2, 0, n - 5)
        x = (t - self.grid[i0]) / self.h
        samples = self.values[i0[:, None] + np.arange(5)]
        coef = samples @ self._vinv.T
        out = np.zeros_like(t)
        for j in range(k, 5):
            out += coef[:, j] * (factorial(j) / factorial(j - k)) * x ** (j - k)
        out /= self.h**k
        return float(out[0]) if scalar else out


class ReflectedProfile(RadialProfile):
    """Even extension ``f(-t) = f(t)`` of a profile defined on ``[0, T]``."""

    def __init__(self, base):
        if abs(base.domain[0]) > 1e-14:
            raise InputError("reflection needs a profile starting at t = 0")
        super().__init__((-base.domain[1], base.domain[1]))
        self.base = base
        self.max_order = base.max_order
        self.source = base.source

    def _deriv(self, t, k):
        sign = np.where(t < 0, -1.0, 1.0) ** k
        out = sign * self.base.deriv(np.abs(t), k)
        return float(out) if np.ndim(out) == 0 else out


class ShiftedSinh(ClosedFormProfile):
    """``sinh(t + shift)``: the hyperbolic warping function."""

    def __init__(self, shift, domain):
        fns = [lambda t, k=k: (np.sinh if k % 2 == 0 else np.cosh)(t + shift) for k in range(MAX_ORDER + 1)]
        super().__init__(fns, domain, label=f"sinh(t{shift:+.6g})")
        self.shift = shift
