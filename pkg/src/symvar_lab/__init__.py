"""Numerical laboratory for scalar-curvature functionals on symmetric 3-metrics.

Modules
-------
geometry
    Warped-product metrics with sphere or torus fibers and their curvature.
functionals
    The Z^2 and S^-2 functionals, potentials, L and L*, Euler-Lagrange residuals.
models
    ODE caps glued to hyperbolic bulk and the scaling scan.
canonical
    Schwarzschild and Kasner solutions, masses, asymptotics and audits.
cli
    The ``symvar-lab`` batch driver.
"""

from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("artifact")
except PackageNotFoundError:  # running from a source tree
    __version__ = "0.1.0"
