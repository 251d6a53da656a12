"""Symbolic reduction of tensor expressions on warped 3-metrics.

Everything here is derived once per process with sympy from a generic
diagonal-metric tensor calculus, then compiled with ``lambdify``.  Two
metric shapes are supported, both in arclength form::

    sphere:  dt^2 + f(t)^2 (dtheta^2 + sin(theta)^2 dphi^2)
    torus:   dt^2 + f1(t)^2 dtheta1^2 + f2(t)^2 dtheta2^2

Results are orthonormal-frame components in the frame (d_t, fiber1, fiber2).
Compiled functions take derivative stacks as positional arguments:
``(F0, ..., F4)`` for the sphere and ``(P0, ..., P4, Q0, ..., Q4)`` for the
torus, where ``Fk`` is the k-th derivative of the warping function.

Riemann convention: ``R^a_{bcd} = d_c G^a_{db} - d_d G^a_{cb} + ...`` so that
``Ric_{bd} = R^a_{bad}`` and the unit sphere has positive curvature.  The
curvature operator on symmetric 2-tensors is
``(Rz)_{ij} = R_{ikjl} z^{kl}``, normalized by ``R g = Ric``.
"""

from functools import lru_cache

import sympy as sp

t, theta, phi = sp.symbols("t theta phi", real=True)
COORDS = (t, theta, phi)
ORDER = 4
KINDS = ("sphere", "torus")


def _warps(kind):
    if kind == "sphere":
        f = sp.Function("f")(t)
        g = sp.diag(1, f**2, f**2 * sp.sin(theta) ** 2)
        return g, (f,), (sp.symbols(f"F0:{ORDER + 1}"),)
    if kind == "torus":
        f1 = sp.Function("f1")(t)
        f2 = sp.Function("f2")(t)
        g = sp.diag(1, f1**2, f2**2)
        return g, (f1, f2), (sp.symbols(f"P0:{ORDER + 1}"), sp.symbols(f"Q0:{ORDER + 1}"))
    raise ValueError(f"unknown metric kind {kind!r}")


def _christoffel(g):
    ginv = g.inv()
    n = g.shape[0]
    return [[[sp.together(sum(ginv[k, m] * (sp.diff(g[m, j], COORDS[i]) + sp.diff(g[m, i], COORDS[j])
                                              - sp.diff(g[i, j], COORDS[m])) for m in range(n)) / 2)
              for j in range(n)] for i in range(n)] for k in range(n)]


def _riemann_lower(g, G):
    """All-lower Riemann tensor R_{abcd}."""
    n = g.shape[0]
    up = [[[[sp.diff(G[a][d][b], COORDS[c]) - sp.diff(G[a][c][b], COORDS[d])
             + sum(G[a][c][e] * G[e][d][b] - G[a][d][e] * G[e][c][b] for e in range(n))
             for d in range(n)] for c in range(n)] for b in range(n)] for a in range(n)]
    return [[[[sp.expand(sum(g[a, e] * up[e][b][c][d] for e in range(n)))
               for d in range(n)] for c in range(n)] for b in range(n)] for a in range(n)]


def _cov_d2(T, G):
    """First covariant derivative of a symmetric 2-tensor: S[k][i][j] = D_k T_ij."""
    n = T.shape[0]
    return [[[sp.diff(T[i, j], COORDS[k])
              - sum(G[m][k][i] * T[m, j] + G[m][k][j] * T[i, m] for m in range(n))
              for j in range(n)] for i in range(n)] for k in range(n)]


def _cov_d3(S, G):
    """Covariant derivative of a 3-tensor: U[l][k][i][j] = D_l S_kij."""
    n = len(S)
    return [[[[sp.diff(S[k][i][j], COORDS[l])
               - sum(G[m][l][k] * S[m][i][j] + G[m][l][i] * S[k][m][j] + G[m][l][j] * S[k][i][m]
                     for m in range(n))
               for j in range(n)] for i in range(n)] for k in range(n)] for l in range(n)]


def _hessian(u, G):
    n = len(COORDS)
    return sp.Matrix(n, n, lambda i, j: sp.diff(u, COORDS[i], COORDS[j])
                     - sum(G[k][i][j] * sp.diff(u, COORDS[k]) for k in range(n)))


class _Geometry:
    def __init__(self, kind):
        self.kind = kind
        self.g, self.warps, self.symbols = _warps(kind)
        self.ginv = self.g.inv()
        self.G = _christoffel(self.g)
        self.Rm = _riemann_lower(self.g, self.G)
        n = 3
        self.ric = sp.Matrix(n, n, lambda b, d: sp.simplify(
            sum(self.ginv[a, c] * self.Rm[a][b][c][d] for a in range(n) for c in range(n))))
        self.s = sp.simplify(sum(self.ginv[i, j] * self.ric[i, j] for i in range(n) for j in range(n)))
        self.z = self.ric - self.s / 3 * self.g

    def frame(self, T):
        return [T[i, i] / self.g[i, i] for i in range(3)]

    def laplacian(self, u):
        H = _hessian(u, self.G)
        return sum(self.ginv[i, i] * H[i, i] for i in range(3))

    def curvature_operator(self, T):
        n = 3
        Tup = self.ginv * T * self.ginv
        return sp.Matrix(n, n, lambda i, j: sum(self.Rm[i][k][j][l] * Tup[k, l]
                                                for k in range(n) for l in range(n)))

    def rough_laplacian(self, T):
        U = _cov_d3(_cov_d2(T, self.G), self.G)
        return sp.Matrix(3, 3, lambda i, j: sum(self.ginv[l, l] * U[l][l][i][j] for l in range(3)))

    def norm2(self, T):
        Tup = self.ginv * T * self.ginv
        return sum(T[i, j] * Tup[i, j] for i in range(3) for j in range(3))

    def substitute(self, expr):
        expr = expr.subs(theta, sp.pi / 2)
        reps = {}
        for w, syms in zip(self.warps, self.symbols):
            for k in range(ORDER, 0, -1):
                reps[sp.Derivative(w, (t, k))] = syms[k]
        expr = expr.subs(reps)
        for w, syms in zip(self.warps, self.symbols):
            expr = expr.subs(w, syms[0])
        return sp.simplify(expr)

    @property
    def args(self):
        return [s for syms in self.symbols for s in syms]


@lru_cache(maxsize=None)
def geometry(kind):
    return _Geometry(kind)


def _compile(kind, exprs, extra=()):
    geo = geometry(kind)
    return sp.lambdify(geo.args + list(extra), exprs, modules="numpy", cse=True)


@lru_cache(maxsize=None)
def ricci_frame(kind):
    """Compiled Ricci eigenvalues ``(ric1, ric2, ric3)``."""
    geo = geometry(kind)
    return _compile(kind, [geo.substitute(e) for e in geo.frame(geo.ric)])


@lru_cache(maxsize=None)
def scalar_jet(kind):
    """Compiled ``(s, ds/dt, d2s/dt2)`` along the radial direction."""
    geo = geometry(kind)
    s_t = geo.s.subs(theta, sp.pi / 2)
    return _compile(kind, [geo.substitute(sp.diff(s_t, t, k)) for k in range(3)])


@lru_cache(maxsize=None)
def _grad_z2_exprs(kind):
    geo = geometry(kind)
    z, s, g = geo.z, geo.s, geo.g
    lap_s = geo.laplacian(s)
    grad = (-geo.rough_laplacian(z) + _hessian(s, geo.G) / 3 - 2 * geo.curvature_operator(z)
            + (geo.norm2(z) - lap_s / 3) / 2 * g)
    diag = [geo.substitute(e) for e in geo.frame(grad)]
    off = [geo.substitute(grad[i, j] / sp.sqrt(g[i, i] * g[j, j]))
           for i in range(3) for j in range(3) if i < j]
    return diag, off


@lru_cache(maxsize=None)
def grad_z2_frame(kind):
    """Compiled frame components of the L2 gradient of Z^2 = int |z|^2 dV."""
    return _compile(kind, _grad_z2_exprs(kind)[0])


def grad_z2_offdiagonal(kind):
    """Symbolic off-diagonal frame components (identically zero for these metrics)."""
    return _grad_z2_exprs(kind)[1]


H_SYMBOLS = tuple(sp.symbols(f"H{i}_0:3") for i in range(1, 4))


def _linearized_expr(kind):
    geo = geometry(kind)
    hs = [sp.Function(f"h{i}")(t) for i in range(1, 4)]
    h = sp.diag(*[hs[i] * geo.g[i, i] for i in range(3)])
    U = _cov_d3(_cov_d2(h, geo.G), geo.G)
    divdiv = sum(geo.ginv[l, l] * geo.ginv[k, k] * U[l][k][l][k] for l in range(3) for k in range(3))
    ric = geo.frame(geo.ric)
    expr = -geo.laplacian(sum(hs)) + divdiv - sum(r * hi for r, hi in zip(ric, hs))
    reps = {}
    for hi, syms in zip(hs, H_SYMBOLS):
        for k in (2, 1):
            reps[sp.Derivative(hi, (t, k))] = syms[k]
    expr = expr.subs(reps)
    expr = expr.subs({hi: syms[0] for hi, syms in zip(hs, H_SYMBOLS)})
    return geo.substitute(expr)


@lru_cache(maxsize=None)
def linearized_scalar(kind):
    """Compiled ``L(h) = -Lap tr h + div div h - <r, h>`` for radial diagonal ``h``.

    ``h`` is given by frame components ``h1, h2, h3`` (functions of t); the
    extra arguments are ``(h1, h1', h1'', h2, ..., h3'')``.
    """
    return _compile(kind, _linearized_expr(kind), [s for syms in H_SYMBOLS for s in syms])

def _kernel_source(name, args, exprs):
    reps, reduced = sp.cse(exprs, symbols=sp.numbered_symbols("x"), optimizations="basic")
    lines = [f"def {name}({', '.join(str(a) for a in args)}):"]
    for sym, e in reps:
        lines.append(f"    {sym} = {sp.pycode(e, fully_qualified_modules=False)}")
    body = ", ".join(sp.pycode(e, fully_qualified_modules=False) for e in reduced)
    lines.append(f"    return ({body},)" if len(reduced) == 1 else f"    return ({body})")
    return "\n".join(lines)


def kernel_table():
    """``{name: (args, exprs)}`` for every kernel written to ``_kernels.py``."""
    table = {}
    for kind in KINDS:
        geo = geometry(kind)
        s_t = geo.s.subs(theta, sp.pi / 2)
        table[f"ricci_{kind}"] = (geo.args, [geo.substitute(e) for e in geo.frame(geo.ric)])
        table[f"scalar_jet_{kind}"] = (geo.args, [geo.substitute(sp.diff(s_t, t, k)) for k in range(3)])
        table[f"grad_z2_{kind}"] = (geo.args, _grad_z2_exprs(kind)[0])
        table[f"linearized_scalar_{kind}"] = (geo.args + [s for syms in H_SYMBOLS for s in syms],
                                              [_linearized_expr(kind)])
    return table


def emit(path):
    header = ('"""Generated by ``python -m symvar_lab._symbolic``; do not edit.\n\n'
              'Frame-component kernels for warped 3-metrics, see ``_symbolic`` for the\n'
              'derivation and argument conventions.\n"""')
    bodies = [_kernel_source(name, args, exprs) for name, (args, exprs) in kernel_table().items()]
    if any("sqrt(" in b for b in bodies):
        header += "\n\nfrom numpy import sqrt"
    with open(path, "w") as fh:
        fh.write("\n\n\n".join([header, *bodies]) + "\n")


if __name__ == "__main__":
    import pathlib

    emit(pathlib.Path(__file__).with_name("_kernels.py"))
