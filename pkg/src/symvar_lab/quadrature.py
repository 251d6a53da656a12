"""Quadrature front-ends.

Adaptive integration is Gauss-Kronrod: QUADPACK (``scipy.integrate.quad``)
for scalar callables and ``scipy.integrate.cubature`` for vectorized,
vector-valued integrands.  The fixed composite Gauss-Legendre rule is used where the same nodes must be
reused across a family of integrands (finite differences in a parameter).
"""

import warnings

import numpy as np
from scipy import integrate

from .errors import NumericError

REL_TOL = 1e-9


def adaptive(fn, a, b, rel_tol=REL_TOL, abs_tol=0.0, points=None, limit=500, weight=None, wvar=None):
    """Integrate a scalar callable on ``[a, b]``; raise when the tolerance is missed.

    Raises
    ------
    NumericError
        Carries the achieved error estimate in ``.achieved``.
    """
    if a == b:
        return 0.0
    kwargs = dict(epsrel=rel_tol, epsabs=abs_tol, limit=limit, full_output=True)
    if points is not None:
        kwargs["points"] = points
    if weight is not None:
        kwargs.update(weight=weight, wvar=wvar)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        out = integrate.quad(lambda x: float(fn(x)), a, b, **kwargs)
    val, err = out[0], out[1]
    if not np.isfinite(val):
        raise NumericError("quadrature produced a non-finite value", achieved=np.inf)
    # QUADPACK flags roundoff when the floor is reached; accept anything within 10x of target
    if err > 10 * max(rel_tol * abs(val), abs_tol) and err > 1e-13 * max(abs(val), 1.0):
        raise NumericError(f"quadrature missed tolerance ({err:.3g} on {val:.6g})", achieved=err)
    return val


def adaptive_vector(fn, a, b, rel_tol=REL_TOL, abs_tol=0.0, points=None, max_subdivisions=2000):
    """Integrate a vectorized, vector-valued ``fn(t) -> array(k, n)`` on ``[a, b]``.

    All components share one adaptive subdivision.  Raises
    :class:`NumericError` (with the achieved estimate) when not converged.
    """
    if a == b:
        return np.zeros(np.shape(fn(np.array([a])))[0])
    pts = None if points is None else [np.array([p]) for p in points if a < p < b]
    res = integrate.cubature(lambda x: fn(x[:, 0]).T, [a], [b], rule="gk21", rtol=rel_tol,
                             atol=abs_tol, points=pts, max_subdivisions=max_subdivisions)
    if res.status != "converged":
        raise NumericError("vector quadrature missed tolerance", achieved=float(np.max(res.error)))
    return np.asarray(res.estimate, dtype=float)


def gauss_legendre_nodes(a, b, panels=8, order=16):
    """Nodes and weights of a composite Gauss-Legendre rule on ``[a, b]``."""
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def fixed(fn, a, b, panels=8, order=16):
    """Composite Gauss-Legendre with a vectorized integrand."""
    nodes, weights = gauss_legendre_nodes(a, b, panels, order)
    return float(np.dot(weights, fn(nodes)))
