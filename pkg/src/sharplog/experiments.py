"""Experiment runners behind the command line.

Each runner takes a validated :class:`ExperimentConfig` and returns an
:class:`Outcome` holding named assertions, a results dictionary, tables and
plots.  :func:`run` persists the outcome and wraps it in a
:class:`~sharplog.report.ReportRecord`.
"""

from __future__ import annotations

import dataclasses
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

import numpy as np

from . import dyadic as dy
from . import global_est as ge
from .errors import SharplogError
from .extremal import build_loglog_extremal, loglog_limit_estimate, loglog_row, sharpness_term
from .minimizer import (coefficients_from_contact, contact_from_gap, det_A, energy_by_quadrature,
                        matrix_A, minimizer_profile, scan_constants, sharp_constant)
from .obstacle import PenalizationConfig, cross_validate, load_sign_ok, make_grid, theta
from .radial import RadialProfile, Segment, laplacian_radial, weighted_l2_norm_sq
from .report import (Assertion, ReportRecord, Series, config_hash, csv_text, canonical_json,
                     atomic_write_text, svg_plot)
from .tolerances import TOL, Tolerances

COMMANDS = ("scan", "minimizer", "extremal", "sharpness", "solve-obstacle", "dyadic", "global", "report-all")
FORMATS = ("csv", "json", "svg")

# Claims reported in the summary table, in display order.
CLAIMS = (
    "closed-form minimizer",
    "double-log sharp constant",
    "log estimate fails at threshold",
    "obstacle solver",
    "Littlewood-Paley log estimate",
    "ball rescaling",
    "whole-space cutoff estimate",
    "global log estimate",
    "low/high split estimate",
)


class UsageError(SharplogError):
    """Invalid command-line parameters; ``flag`` names the offending option."""

    def __init__(self, flag: str, message: str):
        super().__init__(f"{flag}: {message}")
        self.flag = flag


@dataclass
class ExperimentConfig:
    command: str
    alpha: float | None = None
    lam: float | None = None
    mu: float | None = None
    x: float | None = None
    D: float | None = None
    eps: float | None = None
    n: int | None = None
    grid_n: int | None = None
    grading: float | None = None
    eps_schedule: tuple[float, ...] | None = None
    tol: dict = field(default_factory=dict)
    formats: tuple[str, ...] = FORMATS
    output: str | None = None
    suite: str | None = None

    def hashed(self) -> dict:
        """Parameters that determine the computation (the output location is excluded)."""
        d = dataclasses.asdict(self)
        d.pop("output")
        d.pop("suite")
        d["tol"] = dict(sorted(self.tol.items()))
        d["formats"] = sorted(self.formats)
        return d

    def tolerances(self) -> Tolerances:
        return dataclasses.replace(TOL, **self.tol)


DEFAULTS: dict[str, dict[str, Any]] = {
    "scan": {"alpha": 0.5},
    "minimizer": {"alpha": 0.5, "x": 0.25},
    "extremal": {"alpha": 0.5, "eps": 1e-8},
    "sharpness": {"alpha": 0.5, "n": 10**6},
    "solve-obstacle": {"alpha": 0.5, "x": 0.25, "grid_n": 1024, "grading": 4.0,
                       "eps_schedule": (1e-2, 1e-3, 1e-4, 1e-5, 1e-6)},
    "dyadic": {"alpha": 0.5, "x": 0.25},
    "global": {"alpha": 0.5, "x": 0.25},
    "report-all": {},
}

def parse_tol(items) -> dict:
    """``KEY=VALUE`` strings into a tolerance override dictionary."""
    names = {f.name for f in dataclasses.fields(Tolerances)}
    out = {}
    for item in items or ():
        key, sep, val = str(item).partition("=")
        key = key.strip().replace("-", "_")
        if not sep or key not in names:
            raise UsageError("--tol", f"expected KEY=VALUE with KEY in {sorted(names)}, got {item!r}")
        try:
            v = float(val)
        except ValueError:
            raise UsageError("--tol", f"value for {key} is not a number: {val!r}") from None
        if not math.isfinite(v) or v < 0:
            raise UsageError("--tol", f"value for {key} must be finite and nonnegative")
        out[key] = v
    return out


def resolve(cfg: ExperimentConfig) -> ExperimentConfig:
    """Fill per-command defaults and validate every parameter range."""
    if cfg.command not in COMMANDS:
        raise UsageError("command", f"unknown command {cfg.command!r}")
    d = dataclasses.asdict(cfg)
    for k, v in DEFAULTS[cfg.command].items():
        if d.get(k) is None and not (k == "x" and d.get("D") is not None):
            d[k] = v
    if isinstance(d["eps_schedule"], list):
        d["eps_schedule"] = tuple(d["eps_schedule"])
    d["formats"] = tuple(d["formats"])
    cfg = ExperimentConfig(**d)
    bad = [f for f in cfg.formats if f not in FORMATS]
    if bad or not cfg.formats:
        raise UsageError("--format", f"formats must be a nonempty subset of {list(FORMATS)}")
    if cfg.alpha is not None and not 0.0 < cfg.alpha < 1.0:
        raise UsageError("--alpha", f"alpha must lie in (0, 1), got {cfg.alpha}")
    if cfg.lam is not None:
        if cfg.alpha is None:
            raise UsageError("--lambda", "lambda needs --alpha")
        if not cfg.lam > 1.0 / sharp_constant(cfg.alpha):
            raise UsageError("--lambda", f"lambda must exceed 1/(8 pi^2 alpha) = {1 / sharp_constant(cfg.alpha):.6g}")
    if cfg.mu is not None and not 0.0 < cfg.mu <= 1.0:
        raise UsageError("--mu", f"mu must lie in (0, 1], got {cfg.mu}")
    if cfg.x is not None and not 0.0 < cfg.x < 1.0:
        raise UsageError("--x", f"x must lie in (0, 1), got {cfg.x}")
    if cfg.D is not None:
        if cfg.x is not None:
            raise UsageError("--D", "give either --x or --D, not both")
        if not cfg.D > 1.0:
            raise UsageError("--D", f"D must exceed 1 so that the obstacle touches, got {cfg.D}")
    if cfg.eps is not None and not 0.0 < cfg.eps <= math.exp(-1.0):
        raise UsageError("--eps", f"eps must lie in (0, 1/e], got {cfg.eps}")
    if cfg.n is not None and (int(cfg.n) != cfg.n or cfg.n < 2):
        raise UsageError("--n", f"n must be an integer >= 2, got {cfg.n}")
    if cfg.grid_n is not None and (int(cfg.grid_n) != cfg.grid_n or cfg.grid_n < 8):
        raise UsageError("--grid-n", f"grid size must be an integer >= 8, got {cfg.grid_n}")
    if cfg.grading is not None and not cfg.grading >= 1.0:
        raise UsageError("--grading", f"grading exponent must be >= 1, got {cfg.grading}")
    if cfg.eps_schedule is not None:
        s = np.asarray(cfg.eps_schedule, float)
        if s.size == 0 or np.any(s <= 0) or np.any(np.diff(s) >= 0):
            raise UsageError("--eps-schedule", "schedule must be positive and strictly decreasing")
    try:
        cfg.tolerances()
    except TypeError as exc:
        raise UsageError("--tol", str(exc)) from None
    return cfg


# ------------------------------------------------------------------ outcome


@dataclass
class Outcome:
    assertions: list[Assertion] = field(default_factory=list)
    results: dict = field(default_factory=dict)
    tables: dict[str, tuple[list[str], list]] = field(default_factory=dict)
    plots: dict[str, str] = field(default_factory=dict)

    def check(self, name: str, invariant: str, claim: str, passed: bool, value=None, bound=None,
              detail: str = "") -> bool:
        self.assertions.append(Assertion(name, invariant, bool(passed), claim, value, bound, detail))
        return bool(passed)


def _profile_table(p: RadialProfile, psi: Callable | None = None, n: int = 401):
    r = np.linspace(0.0, p.R, n)
    u = p(r)
    lap = laplacian_radial(p)(np.maximum(r, 1e-6 * p.R))
    rows = [[a, b, c] + ([float(psi(a))] if psi else []) for a, b, c in zip(r, u, lap)]
    return (["r", "u", "lap_u"] + (["psi"] if psi else []), rows)


# ------------------------------------------------------------------ runners


def run_scan(cfg: ExperimentConfig, tol: Tolerances) -> Outcome:
    out = Outcome()
    lam = cfg.lam or ge.default_lambda(cfg.alpha)
    res = scan_constants(cfg.alpha, lam)
    claim = "double-log sharp constant"
    out.check("F_lower_bound", "closed-form-minimizer.scan_constants: min F_C >= 8 pi^2 alpha", claim,
              res.infimum_estimate >= res.target, res.infimum_estimate, res.target)
    out.check("lambda_H_lower_bound", "closed-form-minimizer.scan_constants: min lambda H_C >= 1",
              "global log estimate", res.lambda_infimum >= 1.0, res.lambda_infimum, 1.0)
    out.check("D_monotone", "closed-form-minimizer.gap_amplitude: D decreasing in x", claim, res.D_monotone)
    out.results = res.to_json()
    t = res.table
    out.tables["scan"] = (["x", "D", "g", "F", "H"],
                          [list(r) for r in zip(t["x"], t["D"], t["g"], t["F"], t["H"])])
    out.plots["scan_F"] = svg_plot(
        [Series("F_C(x)", t["x"], t["F"]), Series("8 pi^2 alpha", [t["x"][0], t["x"][-1]], [res.target] * 2, True)],
        f"F_C for alpha = {cfg.alpha:g}", "x", "F", logx=True)
    return out


def _contact(cfg: ExperimentConfig) -> float:
    if cfg.x is not None:
        return cfg.x
    return contact_from_gap(cfg.alpha, cfg.D).x


def run_minimizer(cfg: ExperimentConfig, tol: Tolerances) -> Outcome:
    out = Outcome()
    x = _contact(cfg)
    m = coefficients_from_contact(cfg.alpha, x)
    claim = "closed-form minimizer"
    match = max(m.matching_residuals())
    bnd = max(m.boundary_residuals())
    out.check("matching", "closed-form-minimizer.coefficients_from_contact: C2 matching at r0", claim, match < tol.matching, match, tol.matching)
    out.check("boundary", "closed-form-minimizer.coefficients_from_contact: clamped boundary at r = 1", claim, bnd < tol.boundary, bnd, tol.boundary)
    d_closed, d_direct = det_A(m.r0), float(np.linalg.det(matrix_A(m.r0)))
    rel = abs(d_closed - d_direct) / abs(d_direct)
    out.check("det_A", "closed-form-minimizer.det_A: closed form equals direct determinant", claim,
              rel < tol.det_rel, rel, tol.det_rel)
    e_q = energy_by_quadrature(m)
    e_rel = abs(e_q / m.energy - 1.0)
    out.check("energy_identity", "closed-form-minimizer.energy_by_quadrature: quadrature energy equals D^2 g", claim,
              e_rel < tol.energy_rel, e_rel, tol.energy_rel)
    prof = minimizer_profile(m)
    out.results = {**m.to_json(), "energy_quadrature": e_q, "det_A": d_closed, "det_A_direct": d_direct,
                   "profile": prof.to_json()}
    psi = lambda r: 1.0 - m.D * r**m.alpha  # noqa: E731
    out.tables["profile"] = _profile_table(prof, psi)
    r = np.linspace(0, 1, 401)
    out.plots["profile"] = svg_plot([Series("u*", r, prof(r)), Series("obstacle", r, psi(r), True)],
                                    f"minimizer alpha = {cfg.alpha:g}, x = {x:g}", "r", "u")
    return out


def run_extremal(cfg: ExperimentConfig, tol: Tolerances) -> Outcome:
    out = Outcome()
    a, target = cfg.alpha, sharp_constant(cfg.alpha)
    eps_list = [10.0**-k for k in range(2, 30) if 10.0**-k > cfg.eps * (1 + 1e-9)] + [cfg.eps]
    rows = [loglog_row(e, a) for e in eps_list]
    claim = "double-log sharp constant"
    qmin = min(r.quotient for r in rows)
    out.check("quotient_above_sharp", "extremal-families.loglog_quotient: quotient >= 8 pi^2 alpha", claim,
              qmin >= target, qmin, target)
    last = rows[-1]
    out.check("pinch", "extremal-families.loglog_quotient: within the pinch factor at the smallest eps",
              claim, last.quotient <= tol.pinch_factor * target, last.quotient, tol.pinch_factor * target,
              f"ratio to target {last.quotient / target:.6g}")
    lim = loglog_limit_estimate(a)
    out.check("limit_above_sharp", "extremal-families.loglog_limit_estimate: limit >= 8 pi^2 alpha to fit accuracy",
              claim, lim.extrapolated >= target * (1 - 1e-5), lim.extrapolated, target)
    fam = build_loglog_extremal(cfg.eps)
    out.check("breakpoint_continuity", "extremal-families.build_loglog_extremal: u_eps continuous with matched derivatives", claim,
              all(v <= tol.continuity for row in fam.breakpoint_residuals() for k, v in row.items() if k != "r"))
    out.results = {"target": target, "rows": [dataclasses.asdict(r) for r in rows],
                   "limit": {**dataclasses.asdict(lim), "relative_excess": lim.relative_excess}}
    out.tables["quotients"] = (["eps", "L", "sup", "lip", "holder", "lap_l2_sq", "n_alpha", "quotient"],
                               [list(dataclasses.astuple(r)) for r in rows])
    out.plots["quotients"] = svg_plot(
        [Series("quotient", eps_list, [r.quotient for r in rows]),
         Series("8 pi^2 alpha", [eps_list[0], eps_list[-1]], [target] * 2, True)],
        f"double-log quotient, alpha = {a:g}", "eps", "Q", logx=True)
    return out


def run_sharpness(cfg: ExperimentConfig, tol: Tolerances) -> Outcome:
    out = Outcome()
    a, target = cfg.alpha, sharp_constant(cfg.alpha)
    ns = [10**k for k in range(1, 40) if 10**k <= cfg.n]
    if ns[-1] != cfg.n:
        ns.append(int(cfg.n))
    terms = [sharpness_term(a, n) for n in ns]
    claim = "log estimate fails at threshold"
    below = [t.n for t in terms if t.H_n < target]
    out.check("exists_below", "extremal-families.sharpness_term: some H_n < 8 pi^2 alpha", claim,
              bool(below), min(t.H_n for t in terms), target, f"first n below: {below[0] if below else None}")
    tail = [t.H_n for t in terms if t.n >= 100]
    out.check("monotone", "extremal-families.sharpness_term: H_n increasing in n", claim,
              len(tail) < 2 or bool(np.all(np.diff(tail) > 0)))
    u0 = max(abs(float(t.u_n(0.0)) - 1.0) for t in terms)
    out.check("normalized", "extremal-families.sharpness_term: u_n(0) = 1", claim, u0 <= 1e-14, u0, 1e-14)
    worst = 0.0
    for t in terms:
        r = np.linspace(0.0, 1.0, 2001)
        worst = max(worst, float(np.max((1.0 - t.D_n * r**a) - t.u_n(r))))
    out.check("feasible", "extremal-families.sharpness_term: u_n stays above its obstacle", claim,
              worst <= tol.feasibility, worst, tol.feasibility)
    out.results = {"target": target, "rows": [t.row() for t in terms]}
    hdr = ["n", "x_n", "D_n", "b_n", "c_n", "g_n", "H_n"]
    out.tables["sharpness"] = (hdr, [[t.row()[k] for k in hdr] for t in terms])
    out.plots["sharpness"] = svg_plot(
        [Series("H_n", ns, [t.H_n for t in terms]), Series("8 pi^2 alpha", [ns[0], ns[-1]], [target] * 2, True)],
        f"H_n for alpha = {a:g}", "n", "H", logx=True)
    return out


def theta_properties(rng: np.random.Generator, n_eps: int = 50, n: int = 200) -> dict[str, bool]:
    """Random checks of the penalty switch: range, monotonicity and Lipschitz constant."""
    ok = {"range": True, "nonincreasing": True, "lipschitz": True}
    for eps in 10.0 ** rng.uniform(-8, 0, n_eps):
        t = rng.uniform(-2, 2, n) * eps
        s = t + rng.uniform(0, 2, n) * eps
        a, b = np.asarray(theta(t, eps)), np.asarray(theta(s, eps))
        ok["range"] &= bool(np.all((a >= 0) & (a <= 1)))
        ok["nonincreasing"] &= bool(np.all(b <= a))
        ok["lipschitz"] &= bool(np.all(np.abs(a - b) <= (s - t) / eps * (1 + 1e-12) + 1e-15))
    return ok


def run_solve_obstacle(cfg: ExperimentConfig, tol: Tolerances) -> Outcome:
    out = Outcome()
    x = _contact(cfg)
    grid = make_grid(int(cfg.grid_n), cfg.grading)
    pen_cfg = PenalizationConfig(tuple(cfg.eps_schedule))
    cv = cross_validate(cfg.alpha, x, grid, pen_cfg)
    claim = "obstacle solver"
    out.check("qp_energy", "obstacle-solver.qp_oracle: energy within tolerance of D^2 g", claim,
              abs(cv.qp_energy_rel) <= tol.solver_energy, cv.qp_energy_rel, tol.solver_energy)
    out.check("penalized_energy", "obstacle-solver.solve_penalized: energy within tolerance of D^2 g", claim,
              abs(cv.pen_energy_rel) <= tol.solver_energy, cv.pen_energy_rel, tol.solver_energy)
    out.check("solver_agreement", "obstacle-solver.cross_validate: penalized and QP energies agree", claim,
              abs(cv.pen_vs_qp_rel) <= tol.solver_agreement, cv.pen_vs_qp_rel, tol.solver_agreement)
    out.check("contact_radius", "obstacle-solver.qp_oracle: contact radius near sqrt(x)", claim,
              cv.contact_error_cells <= tol.contact_cells, cv.contact_error_cells, tol.contact_cells)
    gaps = cv.gaps
    out.check("feasibility_gap", "obstacle-solver.solve_penalized: feasibility gap vanishes along the schedule",
              claim, bool(np.all(np.diff(gaps) <= 0)) and gaps[-1] <= tol.gap_final, gaps[-1], tol.gap_final,
              "gaps " + ", ".join(f"{g:.3e}" for g in gaps))
    out.check("load_sign", "obstacle-solver.load_sign_ok: obstacle load nonnegative", claim, load_sign_ok(cfg.alpha, cv.D, grid))
    props = theta_properties(np.random.default_rng(20240531))
    out.check("theta_properties", "obstacle-solver.theta: range, monotone, Lipschitz 1/eps", claim,
              all(props.values()), detail=str(props))
    out.results = {**cv.to_json(), "qp": cv.qp.to_json(), "penalized": cv.penalized.to_json(),
                   "eps_schedule": list(cfg.eps_schedule), "grid_n": cfg.grid_n, "grading": cfg.grading}
    m = coefficients_from_contact(cfg.alpha, x)
    ref = minimizer_profile(m)
    r = grid.nodes
    uq, up = cv.qp.nodal_values, cv.penalized.nodal_values
    out.tables["solution"] = (["r", "u_qp", "u_penalized", "u_closed_form", "psi"],
                              [list(v) for v in zip(r, uq, up, ref(r), 1.0 - m.D * r**cfg.alpha)])
    out.plots["solution"] = svg_plot(
        [Series("QP", r, uq), Series("penalized", r, up), Series("closed form", r, ref(r), True)],
        f"obstacle solution alpha = {cfg.alpha:g}, x = {x:g}", "r", "u")
    return out


def gaussian_profile(R: float = 12.0, n: int = 20001) -> RadialProfile:
    """``exp(-r^2/2)`` as a sampled profile; its R^4 transform is ``(2 pi)^2 exp(-rho^2/2)``."""
    r = np.linspace(0.0, R, n)
    g = np.exp(-r**2 / 2)
    return RadialProfile(R, (Segment(0.0, R, "sampled", {"nodes": r.tolist(), "values": g.tolist(),
                                                        "slopes": (-r * g).tolist()}),))


def gaussian_transform_error() -> float:
    grid = dy.hankel_grid()
    F = dy.radial_fourier(gaussian_profile(), "forward", grid, check_resolution=False)
    k = F.rho < 10
    return float(np.abs(F.values[k] - dy.FOURIER_FACTOR * np.exp(-F.rho[k]**2 / 2)).max() / dy.FOURIER_FACTOR)


def _ll_reports(name: str):
    reps = []
    for item in dy.corpus(name):
        rep = dy.verify_ll_estimate(item.profile, item.alpha)
        reps.append((item, rep))
    return reps


def run_dyadic(cfg: ExperimentConfig, tol: Tolerances) -> Outcome:
    out = Outcome()
    claim = "Littlewood-Paley log estimate"
    cut = dy.build_cutoffs()
    part = max(cut.partition_residual(), cut.homogeneous_residual())
    out.check("partition", "dyadic-analysis.build_cutoffs: partition of unity", claim,
              part < tol.partition, part, tol.partition)
    prof = minimizer_profile(coefficients_from_contact(cfg.alpha, cfg.x))
    d = dy.decompose(prof, alpha=cfg.alpha)
    rec = d.reconstruction_error()
    out.check("reconstruction", "dyadic-analysis.decompose: blocks sum back to u", claim,
              rec < tol.reconstruction, rec, tol.reconstruction)
    pl = abs(d.spectrum.energy() / weighted_l2_norm_sq(prof) - 1.0)
    out.check("plancherel", "dyadic-analysis.radial_fourier: Plancherel identity", claim,
              pl < tol.plancherel, pl, tol.plancherel)
    ge_err = gaussian_transform_error()
    out.check("gaussian_transform", "dyadic-analysis.radial_fourier: Gaussian is self-dual", claim,
              ge_err < tol.transform, ge_err, tol.transform)
    cal = _ll_reports("calibration")
    consts = dy.calibrate_ll([r for _, r in cal])
    val = _ll_reports("validation")
    dy.attach([r for _, r in val], consts)
    rows = []
    for item, rep in val:
        checks = rep.checks()
        rows.append([item.id, rep.alpha, rep.m, rep.N_alpha, rep.low_ratio, rep.mid_ratio, rep.high_ratio,
                     rep.prop_ratio, rep.prop_margin, all(checks.values())])
        for k, ok in checks.items():
            if not ok:
                out.check(f"validation:{item.id}:{k}", f"dyadic-analysis.verify_ll_estimate: {k}", claim, False)
    out.check("validation_corpus", "dyadic-analysis.verify_ll_estimate: all checks on the validation corpus",
              claim, all(r[-1] for r in rows), sum(bool(r[-1]) for r in rows), len(rows))
    # Final whole-space estimate through the low/high split, constants frozen the same way.
    split_cal = [ge.verify_low_high_split(it.profile, it.alpha) for it in dy.corpus("calibration")]
    split_consts = ge.calibrate_split(split_cal)
    split_val = [(it, ge.verify_low_high_split(it.profile, it.alpha, constants=split_consts))
                 for it in dy.corpus("validation")]
    split_ok = [all(r.checks().values()) for _, r in split_val]
    out.check("split_validation", "global-estimates.verify_low_high_split: all checks on the validation corpus",
              "low/high split estimate", all(split_ok), sum(split_ok), len(split_ok))
    out.results = {
        "partition_residual": part, "reconstruction_error": rec, "plancherel_defect": pl,
        "gaussian_transform_error": ge_err, "cutoffs": cut.to_json(), "blocks": d.rows(),
        "ll_constants": consts.to_json(), "split_constants": split_consts.to_json(),
        "calibration": {it.id: r.to_json() for it, r in cal},
        "validation": {it.id: r.to_json() for it, r in val},
        "split_validation": {it.id: r.to_json() for it, r in split_val},
    }
    out.tables["blocks"] = (["j", "l2", "sup", "bernstein_ratio", "resolved"],
                            [[r["j"], r["l2"], r["sup"], r["bernstein_ratio"], r["resolved"]] for r in d.rows()])
    out.tables["validation"] = (["item", "alpha", "m", "N_alpha", "low_ratio", "mid_ratio", "high_ratio",
                                 "prop_ratio", "prop_margin", "passed"], rows)
    out.tables["split_validation"] = (
        ["item", "low_ratio", "h1_ratio", "v_sup", "v_step_rhs", "sup", "chain_rhs", "final_rhs", "passed"],
        [[it.id, r.low_ratio, r.h1_ratio, r.v_sup, r.v_step_rhs, r.sup, r.chain_rhs, r.final_rhs, ok]
         for (it, r), ok in zip(split_val, split_ok)])
    br = [r for r in d.rows() if r["sup"] > 0]
    out.plots["blocks"] = svg_plot([Series("sup |D_j u|", [r["j"] for r in br], [math.log10(r["sup"]) for r in br])],
                                   "dyadic block sizes", "j", "log10 sup")
    return out


def run_global(cfg: ExperimentConfig, tol: Tolerances) -> Outcome:
    out = Outcome()
    a = cfg.alpha
    lam = cfg.lam or ge.default_lambda(a)
    prof = minimizer_profile(coefficients_from_contact(a, cfg.x))
    resc = []
    for R in (0.1, 2.0, 10.0):
        rep = ge.rescale_check(prof, R, a, lam)
        resc.append(rep)
        out.check(f"scaling_R={R:g}", "global-estimates.rescale_check: R^alpha N(u_R) = N(u)", "ball rescaling",
                  rep.scaling_defect <= tol.scaling, rep.scaling_defect, tol.scaling)
        out.check(f"rescaled_estimates_R={R:g}", "global-estimates.rescale_check: estimates transfer to B_R",
                  "ball rescaling", all(rep.checks().values()), detail=str(rep.checks()))
    mus = (cfg.mu,) if cfg.mu is not None else (0.25, 0.5, 1.0)
    claim = "whole-space cutoff estimate"
    cuts = {}
    for mu in mus:
        c = ge.build_phi_mu(mu)
        mx = c.constraint_maxima()
        cuts[mu] = {**c.to_json(), **mx}
        out.check(f"cutoff_grad_mu={mu:g}", "global-estimates.build_phi_mu: |grad phi| <= 1", claim,
                  mx["grad_max"] <= 1.0, mx["grad_max"], 1.0)
        out.check(f"cutoff_lap_mu={mu:g}", "global-estimates.build_phi_mu: |Lap phi| <= 1", claim,
                  mx["lap_max"] <= 1.0, mx["lap_max"], 1.0)
    out.check("bookkeeping", "global-estimates.cross_term_coefficients: collected coefficients dominated",
              claim, ge.bookkeeping_holds())
    items = dy.corpus("calibration") + dy.corpus("validation")
    rows, per = [], {}
    for mu in mus:
        for it in items:
            rep = ge.verify_global_log(it.profile, it.alpha, mu=mu, corpus_id=it.id)
            ch = rep.checks()
            rows.append([it.id, it.alpha, mu, rep.lhs, rep.rhs, rep.margin, rep.terms["I"], rep.bounds["I"],
                         rep.terms["II"], rep.bounds["II"], rep.terms["III"], rep.bounds["III"],
                         all(ch.values())])
            per[f"{it.id}|mu={mu:g}"] = rep.to_json()
            for k, ok in ch.items():
                if not ok:
                    out.check(f"{it.id}:mu={mu:g}:{k}", f"global-estimates.verify_global_log: {k}",
                              claim if k.startswith(("bound", "sup", "holder", "expansion", "mu_norm"))
                              else "global log estimate", False)
        passed = [r[-1] for r in rows if r[2] == mu]
        out.check(f"corpus_mu={mu:g}", "global-estimates.verify_global_log: all checks on the corpus",
                  "global log estimate", all(passed), sum(passed), len(passed))
    out.results = {"lambda": lam, "rescale": [r.to_json() for r in resc], "cutoffs": cuts,
                   "cross_term_coefficients": {f"{m:g}": ge.cross_term_coefficients(m) for m in mus},
                   "corpus": per}
    out.tables["corpus"] = (["item", "alpha", "mu", "lhs", "rhs", "margin", "I", "bound_I", "II", "bound_II",
                             "III", "bound_III", "passed"], rows)
    shape = ge.default_cutoff_shape()
    r = np.linspace(0.0, 8.0, 801)
    out.tables["cutoff"] = (["r", "phi", "dphi", "lap_phi"],
                            [list(v) for v in zip(r, shape.phi(r), shape.dphi(r), shape.lap(r))])
    out.plots["cutoff"] = svg_plot([Series("phi", r, shape.phi(r)), Series("phi'", r, shape.dphi(r)),
                                    Series("Lap phi", r, shape.lap(r), True)], "cutoff profile", "r", "value")
    return out


RUNNERS: dict[str, Callable[[ExperimentConfig, Tolerances], Outcome]] = {
    "scan": run_scan, "minimizer": run_minimizer, "extremal": run_extremal, "sharpness": run_sharpness,
    "solve-obstacle": run_solve_obstacle, "dyadic": run_dyadic, "global": run_global,
}


# ------------------------------------------------------------------ persist


def persist(outcome: Outcome, record: ReportRecord, directory: Path, formats) -> dict:
    """Write tables, plots and the record; returns the relative output paths."""
    paths: dict[str, str] = {}
    if "csv" in formats:
        for name, (hdr, rows) in outcome.tables.items():
            atomic_write_text(directory / f"{name}.csv", csv_text(hdr, rows))
            paths[f"{name}.csv"] = f"{name}.csv"
    if "svg" in formats:
        for name, svg in outcome.plots.items():
            atomic_write_text(directory / f"{name}.svg", svg)
            paths[f"{name}.svg"] = f"{name}.svg"
    if "json" in formats:
        paths["record.json"] = "record.json"
        paths["results.json"] = "results.json"
    record.outputs = dict(sorted(paths.items()))
    if "json" in formats:
        atomic_write_text(directory / "results.json", canonical_json(outcome.results))
        atomic_write_text(directory / "record.json", canonical_json(record.to_json()))
    atomic_write_text(directory / "timing.json", canonical_json({"wall_time": record.wall_time}))
    return paths


def run(cfg: ExperimentConfig, root: Path) -> ReportRecord:
    """Execute one experiment and write its outputs under ``root/<command>-<hash>``."""
    cfg = resolve(cfg)
    conf = cfg.hashed()
    h = config_hash(conf)
    exp_id = f"{cfg.command}-{h}"
    rec = ReportRecord(exp_id, cfg.command, conf, h)
    t0 = time.perf_counter()
    try:
        outcome = RUNNERS[cfg.command](cfg, cfg.tolerances())
    except SharplogError as exc:
        rec.error = f"{type(exc).__name__}: {exc}"
        outcome = Outcome()
    rec.wall_time = time.perf_counter() - t0
    rec.assertions = outcome.assertions
    rec.results = _summary_numbers(outcome)
    persist(outcome, rec, Path(root) / exp_id, cfg.formats)
    return rec


def _summary_numbers(outcome: Outcome) -> dict:
    """Scalar results only; full tables live in ``results.json``."""
    return {k: v for k, v in outcome.results.items() if isinstance(v, (int, float, str, bool)) or v is None}


__all__ = [
    "COMMANDS", "FORMATS", "CLAIMS", "UsageError", "ExperimentConfig", "DEFAULTS", "parse_tol", "resolve",
    "Outcome", "RUNNERS", "run", "persist", "theta_properties", "gaussian_profile", "gaussian_transform_error",
]
