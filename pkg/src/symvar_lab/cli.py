"""Batch driver: ``symvar-lab <command> --config <path.json> [--out DIR] [--jobs N] [--set k=v]``.

Every command produces check rows (id, description, value, target,
tolerance, comparison, pass) and one plot-ready CSV; ``report.json`` mirrors
the rows.  Exit codes: 0 all checks pass, 1 some check fails, 2 invalid
configuration, 3 internal numeric error.
"""

import argparse
import copy
import csv
import io
import json
import math
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__, canonical, functionals, models, quadrature
from .errors import InputError, SymvarError
from .geometry import SymmetricMetric, curvature_at, curvature_oracle
from .profiles import ClosedFormProfile

COMMANDS = ("curvature", "functional", "model-scan", "schwarzschild-verify", "kasner-scan", "audit-b8")

DEFAULTS = {
    "m": 1.0,
    "alpha": 1.0,
    "tau_normalization": "consistent",
    "bulk_volumes": [1.0, 1.0],
    "eps_grid": {"min": 1e-6, "max": 1e-3, "count": 13, "spacing": "log"},
    "delta_grid": {"min": 1e-4, "max": 1e-1, "count": 41, "spacing": "log"},
    "d_grid": {"min": 0.01, "max": 0.99, "count": 99, "spacing": "linear"},
    "tolerances": {"quadrature_rel": 1e-9, "residual_sup": 1e-5, "fit_slope_tol": 0.05},
    "output": {"dir": "symvar-out"},
    "jobs": 1,
}


class ConfigError(InputError):
    """Configuration rejected (schema, grid or override problem)."""


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------


def _schema():
    text = resources.files("symvar_lab").joinpath("schema/run_config.schema.json").read_text()
    return json.loads(text)


def _merge(base, extra):
    out = copy.deepcopy(base)
    for k, v in extra.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


def apply_override(cfg, assignment):
    """Apply ``key.sub=value`` (value parsed as JSON, else kept as a string)."""
    if "=" not in assignment:
        raise ConfigError(f"override {assignment!r} is not key=value")
    key, raw = assignment.split("=", 1)
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    node = cfg
    parts = key.strip().split(".")
    for p in parts[:-1]:
        if not isinstance(node.get(p, {}), dict):
            raise ConfigError(f"override {key!r} descends into a non-object")
        node = node.setdefault(p, {})
    node[parts[-1]] = value
    return cfg


@dataclass(frozen=True)
class RunConfig:
    """Validated run configuration (defaults merged in)."""

    command: str
    m: float
    alpha: float
    tau_normalization: str
    bulk_volumes: tuple
    eps_grid: dict
    delta_grid: dict
    d_grid: dict
    tolerances: dict
    out_dir: str
    jobs: int

    @classmethod
    def from_dict(cls, command, raw):
        if "command" in raw and raw["command"] != command:
            raise ConfigError(f"config command {raw['command']!r} differs from {command!r}")
        # partial objects (a single grid field, say) are completed from the defaults first
        cfg = _merge(DEFAULTS, raw)
        try:
            jsonschema.validate(cfg, _schema())
        except jsonschema.ValidationError as exc:
            raise ConfigError(f"config rejected: {exc.message}") from None
        for name in ("eps_grid", "delta_grid", "d_grid"):
            g = cfg[name]
            if not g["min"] < g["max"]:
                raise ConfigError(f"{name}: min must be below max")
            if g.get("spacing", "linear") == "log" and g["min"] <= 0:
                raise ConfigError(f"{name}: log spacing needs min > 0")
        d = cfg["d_grid"]
        if not (0 < d["min"] and d["max"] < 1):
            raise ConfigError("d_grid must lie inside (0, 1)")
        return cls(command, float(cfg["m"]), float(cfg["alpha"]), cfg["tau_normalization"],
                   tuple(float(v) for v in cfg["bulk_volumes"]), cfg["eps_grid"], cfg["delta_grid"],
                   cfg["d_grid"], cfg["tolerances"], cfg["output"]["dir"], int(cfg["jobs"]))

    def grid(self, name):
        g = getattr(self, name)
        if g.get("spacing", "linear") == "log":
            return np.logspace(math.log10(g["min"]), math.log10(g["max"]), g["count"])
        return np.linspace(g["min"], g["max"], g["count"])

    def tol(self, name):
        return float(self.tolerances[name])

    def echo(self):
        out = asdict(self)
        out["bulk_volumes"] = list(self.bulk_volumes)
        return out


def load_config(command, path=None, overrides=(), out=None, jobs=None):
    """Read, override and validate a configuration; raises :class:`ConfigError`."""
    raw = {}
    if path is not None:
        try:
            raw = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
    for assignment in overrides:
        apply_override(raw, assignment)
    if out is not None:
        raw.setdefault("output", {})["dir"] = out
    if jobs is not None:
        raw["jobs"] = jobs
    return RunConfig.from_dict(command, raw)


# ---------------------------------------------------------------------------
# report rows
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Check:
    """One verified quantity.  ``comparison`` is ``within`` (|value - target| <= tol),
    ``at_most`` (value <= tol), ``at_least`` (value >= tol) or ``holds`` (value == 1)."""

    id: str
    ref: str
    value: float
    target: float
    tolerance: float
    comparison: str

    @property
    def passed(self):
        v = self.value
        if not math.isfinite(v):
            return False
        if self.comparison == "within":
            return abs(v - self.target) <= self.tolerance
        if self.comparison == "at_most":
            return v <= self.tolerance
        if self.comparison == "at_least":
            return v >= self.tolerance
        return v == 1.0

    def as_dict(self):
        d = asdict(self)
        d["pass"] = self.passed
        return d


def within(id_, ref, value, target, tol):
    return Check(id_, ref, float(value), float(target), float(tol), "within")


def at_most(id_, ref, value, tol):
    return Check(id_, ref, float(value), 0.0, float(tol), "at_most")


def at_least(id_, ref, value, tol):
    return Check(id_, ref, float(value), float(tol), float(tol), "at_least")


def holds(id_, ref, flag):
    return Check(id_, ref, 1.0 if flag else 0.0, 1.0, 0.0, "holds")


CHECK_COLUMNS = ("id", "value", "target", "tolerance", "comparison", "pass")


def check_table(rows):
    return CHECK_COLUMNS, [(r.id, r.value, r.target, r.tolerance, r.comparison, r.passed) for r in rows]


@dataclass
class RunReport:
    rows: list
    status: str
    wall_time: float
    config: dict
    tables: dict = field(default_factory=dict, repr=False)

    @property
    def exit_code(self):
        return {"pass": 0, "fail": 1, "error": 3}[self.status]

    def as_dict(self):
        return {"version": __version__, "status": self.status, "wall_time": self.wall_time,
                "config": self.config, "rows": [r.as_dict() for r in self.rows]}


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "%.17g" % v
    return str(v)


def render_csv(command, header, rows):
    buf = io.StringIO()
    buf.write(f"# symvar-lab v{__version__} {command}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# reference metrics
# ---------------------------------------------------------------------------


def metric_fleet():
    """Named metrics used by the invariant suites (sphere and torus fibers)."""
    expr = ClosedFormProfile.from_expr
    return {
        "round_S3": SymmetricMetric.sphere(expr("sin(t)", (0.3, 2.8))),
        "hyperbolic": SymmetricMetric.sphere(expr("sinh(t)", (0.3, 1.5))),
        "generic_sphere": SymmetricMetric.sphere(expr("sinh(t) + t**2/5", (0.3, 1.5))),
        "schwarzschild": SymmetricMetric.sphere(canonical.SchwarzschildProfile(1.0, 60.0)),
        "kasner": canonical.kasner(0.5).metric,
        "generic_torus": SymmetricMetric.torus(expr("exp(3*t/10)", (0.5, 1.5)),
                                               expr("1 + t**2/5", (0.5, 1.5))),
    }


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def _sectional_dev(metric, t, K):
    pt = curvature_at(metric, t)
    return max(float(np.max(np.abs(np.asarray(k) - K))) for k in (pt.K12, pt.K13, pt.K23))


def oracle_order(metric, t, h0=0.1, levels=3):
    """Observed order of the stencil oracle against the analytic curvature (h-halving)."""
    exact = np.array(curvature_at(metric, t).ricci)
    errs = []
    for j in range(levels):
        approx = np.array(curvature_oracle(metric, t, h0 / 2**j).ricci)
        errs.append(float(np.max(np.abs(approx - exact))))
    return min(math.log2(a / b) for a, b in zip(errs[:-1], errs[1:]))


def run_curvature(cfg, map_fn):
    expr = ClosedFormProfile.from_expr
    t = np.linspace(0.3, 2.8, 51)
    s3 = SymmetricMetric.sphere(expr("sin(t)", (0.05, 3.09)))
    h3 = SymmetricMetric.sphere(expr("sinh(t)", (0.05, 3.0)))
    flat = SymmetricMetric.sphere(expr("t", (0.05, 3.0)))
    flat_torus = SymmetricMetric.torus(expr("1 + 0*t", (0.05, 3.0)), expr("2 + 0*t", (0.05, 3.0)))
    rows = [
        within("roundS3_K", "sectional curvatures of the round 3-sphere",
               1.0 + _sectional_dev(s3, t, 1.0), 1.0, 1e-12),
        within("hyperbolic_K", "sectional curvatures of hyperbolic space",
               -1.0 - _sectional_dev(h3, t, -1.0), -1.0, 1e-12),
        within("flat_K", "sectional curvatures of Euclidean space", _sectional_dev(flat, t, 0.0), 0.0, 1e-12),
        within("flat_torus_K", "sectional curvatures of a flat torus product",
               _sectional_dev(flat_torus, t, 0.0), 0.0, 1e-12),
    ]
    fleet = {"round_S3": (s3, 1.0), "hyperbolic": (h3, 1.0), "kasner": (canonical.kasner(0.5, (0.5, 2.0)).metric, 1.0),
             "generic_torus": (metric_fleet()["generic_torus"], 1.0)}
    orders = {k: oracle_order(m, t0) for k, (m, t0) in fleet.items()}
    rows.append(at_least("oracle_order", "stencil oracle vs analytic curvature, h-halving order",
                         min(orders.values()), 3.8))
    table = [(r.id, r.value, r.target, r.tolerance, r.comparison, r.passed) for r in rows]
    table += [(f"oracle_order_{k}", v, 3.8, 3.8, "info", True) for k, v in orders.items()]
    return rows, {"curvature": (CHECK_COLUMNS, table)}


# quadrature floor of the gradient check, relative to int |Rm|^2 sum|h_i| dV
GRADIENT_FLOOR = 1e-8


def gradient_errors(metric):
    """Per basket perturbation: ``(id, |int <grad Z^2, h> dV - FD(Z^2, h)|, allowed error)``.

    The allowance is ``max(1e-4 |FD|, floor)``; the floor matters on
    Einstein metrics, where both sides vanish.
    """
    grad = functionals.gradZ2(metric)
    out = []
    for h in functionals.make_basket(metric):
        fd = functionals.fd_Z2(metric, h)
        nodes, weights = quadrature.gauss_legendre_nodes(*h.support)
        natural = float(np.dot(weights, curvature_at(metric, nodes).rnorm2 * np.sum(np.abs(h.values(nodes)), axis=0)
                               * metric.volume_density(nodes)))
        out.append((h.id, abs(functionals.pairing(grad, h, metric) - fd), max(1e-4 * abs(fd), GRADIENT_FLOOR * natural)))
    return out


def _trace_mismatches(metric):
    tau = ClosedFormProfile.from_expr("-1 - t**2/10", metric.domain)
    res = [
        functionals.el_residual("Z2sys", metric, weak=False),
        functionals.el_residual("Zc2", metric, tau, alpha=0.5, weak=False),
        functionals.el_residual("Zs2", metric, tau, alpha=0.5, weak=False),
        functionals.el_residual("StaticVacuum", metric, tau, weak=False),
        functionals.el_residual("FullIepsEL", metric, tau, eps=0.1, weak=False),
    ]
    return max(r.trace_mismatch for r in res)


def run_functional(cfg, map_fn):
    fleet = metric_fleet()
    rows = []
    generic = fleet["generic_sphere"]
    a = functionals.functional_report(generic, 0.01).I_eps_minus
    b = functionals.functional_report(generic.scaled(2.0), 0.01).I_eps_minus
    rows.append(at_most("scale_invariance_Ieps", "I_eps^- under g -> 4g, relative change", abs(a - b) / abs(a), 1e-8))

    names = list(fleet)
    traces = list(map_fn(lambda k: _trace_mismatches(fleet[k]), names))
    rows.append(at_most("trace_consistency", "tensor trace vs trace equation, all systems on the fleet",
                        max(traces), 1e-8))

    grads = list(map_fn(lambda k: gradient_errors(fleet[k]), names))
    worst = 0.0
    detail = []
    for name, errs in zip(names, grads):
        for hid, err, allowed in errs:
            ratio = err / allowed
            worst = max(worst, ratio)
            detail.append((f"gradZ2_{name}_{hid}", ratio, 0.0, 1.0, "info", ratio <= 1.0))
    rows.append(at_most("gradZ2_vs_fd", "grad Z^2 pairing vs finite difference, error / allowance", worst, 1.0))

    fld = functionals.JunctionField()
    errs = []
    for h in (1e-2, 5e-3):
        lhs, rhs = functionals.junction_relation(fld, h)
        errs.append(abs(lhs - rhs))
    rows.append(at_least("junction_order", "junction relation, one-sided stencil order",
                         math.log2(errs[0] / errs[1]), 3.8))

    ann = SymmetricMetric.sphere(ClosedFormProfile.from_expr("sinh(t)", (0.5, 1.5)))
    rep = functionals.functional_report(ann, 0.1)
    s3 = functionals.functional_report(fleet["round_S3"], 0.1)
    rows.append(within("hyperbolic_Sminus2", "S^-2 of a hyperbolic annulus", rep.Sminus2,
                       6.0 * rep.volume ** (2 / 3), 1e-8))
    rows.append(within("roundS3_Sminus2", "S^-2 of a round region", s3.Sminus2, 0.0, 1e-12))
    s = np.linspace(1e-4, 0.3, 301)
    rows.append(at_least("smoothing_convexity", "min of the smoothing square's second derivative",
                         float(np.min(functionals.smoothing_psi_second(0.1, s))), 0.0))
    table = [(r.id, r.value, r.target, r.tolerance, r.comparison, r.passed) for r in rows] + detail
    return rows, {"functional": (CHECK_COLUMNS, table)}


def run_model_scan(cfg, map_fn):
    fit = models.scan_scaling(cfg.grid("eps_grid"), cfg.grid("delta_grid"), cfg.bulk_volumes,
                              map_fn=map_fn, rel_tol=cfg.tol("quadrature_rel"))
    slope = cfg.tol("fit_slope_tol")
    rows = [
        within("p_delta", "power of eps in the optimal core size", fit.p_delta, 0.5, slope),
        within("p_gap", "power of eps in the gap above the floor", fit.p_gap, 0.5, slope),
        holds("minimizer_interior", "every minimizer interior to the delta grid", True),
        holds("unimodal", "I_eps^- unimodal in delta at every eps", bool(np.all(fit.unimodal))),
    ]
    s_dev, ode_res = models.cap_deviations(models.solve_cap_hyperbolic(0.1))
    rows.append(at_most("cap_scalar_curvature", "hyperbolic cap s + 6, sup", s_dev, 1e-6))
    rows.append(at_most("cap_ode_residual", "hyperbolic cap first integral residual / (1 + f^2)", ode_res, 1e-10))
    rows.append(at_most("schwarzschild_cap", "scalar-flat cap vs closed form, sup on [0, 5]",
                        models.schwarzschild_cap_error(1.0), 1e-6))
    curv = []
    for delta in (1e-2, 1e-3, 1e-4):
        asm = models.assemble_model(delta)
        curv.append(asm.blend_curvature)
    rows.append(at_most("blend_curvature", "max |ric| on the blend window", max(curv), models.C_BLEND))
    mean = float(np.mean(curv))
    rows.append(at_most("blend_curvature_spread", "relative spread of blend curvature across delta",
                        max(abs(c - mean) for c in curv) / mean, 0.25))
    table = [(e, d, i, g) for e, d, i, g in fit.rows()]
    return rows, {"model-scan": (("eps", "delta_star", "I_star", "gap"), table)}


def run_schwarzschild(cfg, map_fn):
    m, alpha, norm = cfg.m, cfg.alpha, cfg.tau_normalization
    sol = canonical.schwarzschild(m, alpha, r_max=60 * m, normalization=norm)
    tau = sol.tau
    rows = [
        within("tau_horizon", "|tau| at the horizon", abs(tau.horizon_value), alpha / (8 * m * (2 * m) ** 3), 1e-8),
        at_most("tau_horizon_slope", "normal derivative of tau at the horizon", abs(canonical.horizon_slope(tau)), 1e-5),
    ]
    r = np.linspace(2.05 * m, 40 * m, 400)
    t = sol.t_of_r(r)
    trace = functionals.laplacian(tau, sol.metric, t) + alpha / 4 * curvature_at(sol.metric, t).znorm2
    rows.append(at_most("tau_trace", "Lap tau + (alpha/4)|z|^2, sup", float(np.max(np.abs(trace))), 1e-6))
    rows.append(holds("tau_negative", "tau < 0 on the closed exterior", bool(np.all(tau(np.concatenate([[0.0], t])) < 0))))
    r_q = np.array([2.5, 4.0, 10.0]) * m
    quad = np.array([canonical.tau_by_quadrature(m, alpha, x) for x in r_q])
    closed = canonical.schwarzschild_tau(m, alpha, 60 * m, "literal").at_r(r_q)
    rows.append(at_most("tau_quadrature", "integral formula vs closed form (literal normalization)",
                        float(np.max(np.abs(quad - closed) / np.abs(closed))), 1e-8))

    scale = m ** -4
    res = canonical.verify_schwarzschild_zs2(m, alpha, normalization=norm)
    rows.append(at_most("zs2_pointwise", "Z_s^2 tensor residual sup, r in [2.05m, 40m]", res.sup,
                        cfg.tol("residual_sup") * scale))
    rows.append(at_most("zs2_weak", "Z_s^2 weak residual / max alpha|FD Z^2|", res.weak_sup / res.weak_scale, 1e-4))
    rows.append(at_most("zs2_trace_consistency", "tensor trace vs trace equation", res.trace_mismatch, 1e-8))
    neg = canonical.verify_schwarzschild_zs2(m, alpha, potential="u_static", normalization=norm, weak=False)
    rows.append(at_least("zs2_negative_control", "residual with the static potential in place of tau",
                         neg.sup, 1e-2 * scale))
    res2 = canonical.verify_schwarzschild_zs2(2 * m, alpha, normalization=norm, weak=False)
    rows.append(at_most("zs2_pointwise_2m", "Z_s^2 tensor residual sup at mass 2m", res2.sup,
                        cfg.tol("residual_sup") * (2 * m) ** -4))
    rows.append(at_most("homothety", "tau and |z|^2 under m -> 2m, alpha -> 4 alpha",
                        canonical.homothety_check(m, 2.0, alpha), 1e-8))

    far = canonical.schwarzschild(m, alpha, normalization=norm)
    flux = canonical.mass_flux(far, 100 * m * 2.0 ** np.arange(6))
    m_fit, _ = canonical.expansion_mass(far)
    rows.append(at_most("flux_vs_expansion_mass", "flux mass vs expansion-fit mass, relative",
                        abs(flux.m_E - m_fit) / abs(m_fit), 0.01))
    doubled = canonical.schwarzschild(m, alpha, doubled=True, normalization=norm)
    ident = canonical.mass_identity_check(doubled)
    rows.append(at_most("mass_identity", "curvature integral vs two-end flux, relative", ident.rel_err, 0.005))
    rows.append(holds("mass_identity_positive", "both sides positive", ident.lhs > 0 and ident.rhs > 0))
    af = canonical.asymptotic_flatness_fit(m)
    rows.append(within("flatness_mass", "fitted mass of the conformal factor", af.mass_fit, m, 0.02 * m))
    rows.append(at_least("flatness_order", "remainder decay order", af.decay_order, 1.8))

    pt = curvature_at(sol.metric, t)
    table = [(ri, ti, float(tau(ti)), *(float(x) for x in res.pointwise[:, k]), float(tr), float(pt.s[k]))
             for k, (ri, ti, tr) in enumerate(zip(r, t, trace))]
    header = ("r", "t", "tau", "res1", "res2", "res3", "tau_trace", "s")
    return rows, {"schwarzschild-verify": (header, table)}


def _kasner_row(d):
    a, b, c = canonical.kasner_exponents(d)
    static = canonical.kasner_static_check(d).sup
    ref, _ = canonical.kasner_zs2_margin(d)
    return d, a, b, c, ref.lambda_sq, static, ref.margin, ref.ratio, ref.trace_sup


def run_kasner(cfg, map_fn):
    d_grid = cfg.grid("d_grid")
    table = list(map_fn(_kasner_row, d_grid))
    arr = np.array(table)
    d, a, b, c = arr[:, 0], arr[:, 1], arr[:, 2], arr[:, 3]
    signs = bool(np.all(a < 0) and np.all(b > 0) and np.all((a + b > 0) & (a + b < 1)))
    rows = [
        holds("kasner_exponent_signs", "a < 0 < b and 0 < a + b < 1", signs),
        at_most("kasner_ratio", "| |a| - d b |, max", float(np.max(np.abs(np.abs(a) - d * b))), 1e-12),
        at_most("kasner_vacuum", "| a^2 + b^2 + c^2 - 1 |, max", float(np.max(np.abs(a * a + b * b + c * c - 1))), 1e-12),
        at_most("kasner_static", "static vacuum residual with u = t^c, sup over d", float(np.max(arr[:, 5])), 1e-7),
        at_least("kasner_static_negative", "static residual with u = t^(c + 0.1)",
                 canonical.kasner_static_check(0.5, 0.1).sup, 1e-3),
        at_most("kasner_ricci_oracle", "closed-form Ricci vs stencil oracle, relative",
                canonical.kasner_ricci_check(0.5).rel_err, 1e-8),
        at_most("kasner_trace", "Lap u - |z|^2/4 for the trace solution, sup",
                float(np.max(np.abs(canonical.kasner_trace_residual(0.5, np.linspace(1, 2, 101))))), 1e-8),
    ]
    inside = (d >= 0.05 - 1e-12) & (d <= 0.95 + 1e-12)
    if np.any(inside):
        rows.append(at_least("kasner_refutation", "min Z_s^2 weak margin / lambda^2 over d in [0.05, 0.95]",
                             float(np.min(arr[inside, 7])), 1e-3))
    header = ("d", "a", "b", "c", "lambda_sq", "static_sup", "margin", "margin_over_lambda_sq", "trace_sup")
    return rows, {"kasner-scan": (header, table)}


def run_audit(cfg, map_fn):
    d_grid = cfg.grid("d_grid")
    audit = list(map_fn(canonical.b8_b9_audit, d_grid))
    keys = ("d", "convention", "reading", "lhs_B8", "rhs_B8", "lhs_B9", "rhs_B9", "lambda_sum")
    table = [tuple(row[k] for k in keys) for rows in audit for row in rows]
    summary = canonical.b9_summary(d_grid)
    rows = [holds(f"b9_{conv}", f"lhs < rhs on the whole d grid, {conv} signs, denominator reading",
                  summary[(conv, "denominator")]) for conv in canonical.CONVENTIONS]
    return rows, {"audit-b8": (keys, table)}


RUNNERS = {
    "curvature": run_curvature,
    "functional": run_functional,
    "model-scan": run_model_scan,
    "schwarzschild-verify": run_schwarzschild,
    "kasner-scan": run_kasner,
    "audit-b8": run_audit,
}


def run(cfg):
    """Execute the configured command(s), write CSVs and ``report.json``, return the report."""
    start = time.perf_counter()
    commands = COMMANDS if cfg.command == "all" else (cfg.command,)
    rows, tables, status = [], {}, None
    pool = ThreadPoolExecutor(max_workers=cfg.jobs) if cfg.jobs > 1 else None
    map_fn = pool.map if pool else map
    try:
        for name in commands:
            r, t = RUNNERS[name](cfg, map_fn)
            rows.extend(r)
            tables.update(t)
    except SymvarError as exc:
        if isinstance(exc, InputError):
            raise
        achieved = getattr(exc, "achieved", None)
        rows.append(Check("numeric_error", f"{type(exc).__name__}: {exc}",
                          float(achieved) if achieved is not None else math.nan, 0.0, 0.0, "holds"))
        status = "error"
    finally:
        if pool:
            pool.shutdown()
    if status is None:
        status = "pass" if all(r.passed for r in rows) else "fail"
    report = RunReport(rows, status, time.perf_counter() - start, cfg.echo(), tables)
    write_outputs(report, Path(cfg.out_dir))
    return report


def write_outputs(report, out_dir):
    out_dir.mkdir(parents=True, exist_ok=True)
    for command, (header, table) in report.tables.items():
        (out_dir / f"{command}.csv").write_text(render_csv(command, header, table))
    (out_dir / "report.json").write_text(json.dumps(report.as_dict(), indent=2, allow_nan=True) + "\n")


def build_parser():
    p = argparse.ArgumentParser(prog="symvar-lab", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=COMMANDS + ("all",))
    p.add_argument("--config", help="JSON configuration file")
    p.add_argument("--out", help="output directory (overrides output.dir)")
    p.add_argument("--jobs", type=int, help="worker threads (overrides jobs)")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="override a config field, e.g. --set eps_grid.count=7")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.command, args.config, args.set, args.out, args.jobs)
    except InputError as exc:
        print(f"symvar-lab: {exc}", file=sys.stderr)
        return 2
    try:
        report = run(cfg)
    except InputError as exc:
        print(f"symvar-lab: {exc}", file=sys.stderr)
        return 2
    for r in report.rows:
        print(f"{'PASS' if r.passed else 'FAIL'}  {r.id:28s} {r.value:.6g}")
        if r.id == "numeric_error":
            print(f"symvar-lab: {r.ref}", file=sys.stderr)
    print(f"status: {report.status} ({report.wall_time:.1f} s)")
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
