"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v``; the lines are repeated in a
summary section at the end of the run.
"""

import math
import time
from pathlib import Path

import numpy as np
import pytest

from sharplog import dyadic as dy
from sharplog import global_est as ge
from sharplog.cli import main
from sharplog.experiments import theta_properties
from sharplog.extremal import loglog_quotient, sharpness_term
from sharplog.minimizer import (coefficients_from_contact, det_A, energy_by_quadrature, energy_curves,
                                energy_density, gap_amplitude, h_series_argument, matrix_A, scan_constants,
                                sharp_constant)
from sharplog.obstacle import PenalizationConfig, cross_validate, make_grid

ALPHAS = (0.3, 0.5, 0.7)


def _improving(devs) -> bool:
    return all(a > b for a, b in zip(devs, devs[1:]))


def test_criterion_1_sharp_constant_pinch(criterion):
    checks, parts = {}, []
    for a in ALPHAS:
        target = sharp_constant(a)
        res = scan_constants(a)
        fmin = float(res.table["F"].min())
        q = loglog_quotient(1e-8, a)
        checks[f"F_min>=target(alpha={a})"] = fmin >= target
        checks[f"quotient<=1.05*target(alpha={a})"] = q <= 1.05 * target
        parts.append(f"alpha={a}: F_min/target={fmin / target:.4f}, quotient/target={q / target:.4f}")
    checks["target(0.5)=4pi^2"] = abs(sharp_constant(0.5) - 39.4784) < 1e-4
    assert criterion(1, checks, "; ".join(parts)), checks


def test_criterion_2_failure_at_threshold(criterion):
    a, target = 0.5, sharp_constant(0.5)
    ns = [10**k for k in range(2, 7)]
    terms = [sharpness_term(a, n) for n in ns]
    H = [t.H_n for t in terms]
    r = np.linspace(0.0, 1.0, 4001)
    below = [t for t in terms if t.H_n < target]
    checks = {
        "exists_n<=1e6_below": bool(below),
        "normalized": all(float(t.u_n(0.0)) == 1.0 for t in below),
        "feasible": all(np.all(t.u_n(r) >= 1.0 - t.D_n * r**a - 1e-12) for t in below),
        "monotone_approach": _improving([target - h for h in H]) and H[-1] < target,
    }
    assert criterion(2, checks, "H_n/target: " + ", ".join(f"{h / target:.5f}" for h in H)), checks


def test_criterion_3_closed_form_integrity(criterion):
    rng = np.random.default_rng(3)
    worst = {"matching": 0.0, "boundary": 0.0, "det": 0.0}
    for a, r0 in zip(rng.uniform(0.05, 0.95, 50), rng.uniform(0.02, 0.98, 50)):
        m = coefficients_from_contact(a, r0 * r0)
        worst["matching"] = max(worst["matching"], max(m.matching_residuals()))
        worst["boundary"] = max(worst["boundary"], max(m.boundary_residuals()))
        direct = np.linalg.det(matrix_A(r0))
        worst["det"] = max(worst["det"], abs(det_A(r0) - direct) / abs(direct))
    checks = {
        "matching<1e-9": worst["matching"] < 1e-9,
        "boundary<1e-10": worst["boundary"] < 1e-10,
        "det_rel<1e-12": worst["det"] < 1e-12,
        "det_A(0.5)=-144": abs(det_A(0.5) + 144.0) < 1e-12 * 144,
    }
    assert criterion(3, checks, ", ".join(f"{k}={v:.2e}" for k, v in worst.items())), checks


def test_criterion_4_energy_identity(criterion):
    worst, checks = 0.0, {}
    for a in ALPHAS:
        for x in (1e-4, 1e-2, 0.25, 0.81):
            m = coefficients_from_contact(a, x)
            closed = gap_amplitude(a, x) ** 2 * energy_density(a, x)
            dev = abs(energy_by_quadrature(m) / closed - 1.0)
            worst = max(worst, dev)
            checks[f"alpha={a},x={x:g}"] = dev < 1e-6
    assert criterion(4, checks, f"worst relative deviation {worst:.2e}"), checks


def test_criterion_5_asymptotics(criterion):
    checks, parts = {}, []
    xs = (1e-4, 1e-6, 1e-8)
    for a in ALPHAS:
        g_dev = [abs(energy_density(a, x) / (math.pi**2 * a**2 * (a + 2) ** 2 * x**a * math.log(1 / x)) - 1)
                 for x in xs]
        d_dev = [abs(gap_amplitude(a, x) * a * (2 + a) * x ** (a / 2) * math.log(1 / x) / 4 - 1) for x in xs]
        curves, C = energy_curves(a), scan_constants(a).C_alpha
        f_dev = [abs(curves.F(x, C) / sharp_constant(a) - 1) for x in (1e-8, 1e-16, 1e-32)]
        one_dev = [abs(gap_amplitude(a, 1 - t) - 1) for t in (1e-2, 1e-3, 1e-4)]
        h_dev = [abs(h_series_argument(a, y) / (4 * y * y) - 1) for y in (1e-2, 1e-3, 1e-4)]
        checks[f"g_ratio(alpha={a})"] = _improving(g_dev)
        checks[f"D_ratio(alpha={a})"] = _improving(d_dev)
        checks[f"F_to_target(alpha={a})"] = _improving(f_dev)
        checks[f"D_near_one(alpha={a})"] = _improving(one_dev) and one_dev[-1] <= 1e-2
        checks[f"h_quadratic(alpha={a})"] = _improving(h_dev)
        parts.append(f"alpha={a}: g {g_dev[-1]:.3f}, D {d_dev[-1]:.3f}, D(1-1e-4) {one_dev[-1]:.1e}")
    assert criterion(5, checks, "; ".join(parts)), checks


def test_criterion_6_solver_cross_validation(criterion):
    grid = make_grid(1024)
    cv = cross_validate(0.5, 0.25, grid, PenalizationConfig((1e-2, 1e-3, 1e-4, 1e-5, 1e-6)))
    props = theta_properties(np.random.default_rng(20240531))
    gaps = cv.gaps
    checks = {
        "penalized_vs_qp<=0.5%": abs(cv.pen_vs_qp_rel) <= 5e-3,
        "qp_vs_closed_form<=1%": abs(cv.qp_energy_rel) <= 1e-2,
        "penalized_vs_closed_form<=1%": abs(cv.pen_energy_rel) <= 1e-2,
        "contact_within_2_cells": cv.contact_error_cells <= 2,
        "feasibility_gap_to_zero": bool(np.all(np.diff(gaps) <= 0)) and gaps[-1] <= 1e-6,
        "theta_properties": all(props.values()),
    }
    detail = (f"qp {cv.qp_energy_rel:+.2e}, penalized {cv.pen_energy_rel:+.2e}, "
              f"penalized/qp {cv.pen_vs_qp_rel:+.2e}, contact cells {cv.contact_error_cells:g}, "
              f"gaps {', '.join(f'{g:.3g}' for g in gaps)}")
    assert criterion(6, checks, detail), checks


def test_criterion_7_littlewood_paley(criterion, ll_runs, split_runs):
    cut = dy.build_cutoffs()
    part = max(cut.partition_residual(), cut.homogeneous_residual())
    from sharplog.minimizer import minimizer_profile
    from sharplog.radial import weighted_l2_norm_sq

    u = minimizer_profile(coefficients_from_contact(0.5, 0.25))
    d = dy.decompose(u)
    rec = d.reconstruction_error()
    pl = abs(d.spectrum.energy() / weighted_l2_norm_sq(u) - 1)
    ll_ok = [r.passed() for _, r in ll_runs["validation"]]
    split_ok = [r.passed() for _, r in split_runs["validation"]]
    cal_ids = {it.id for it in dy.corpus("calibration")}
    checks = {
        "partition<1e-10": part < 1e-10,
        "reconstruction<1e-4": rec < 1e-4,
        "plancherel<1e-6": pl < 1e-6,
        "corpora_disjoint": not cal_ids & {it.id for it, _ in ll_runs["validation"]},
        "frozen_from_calibration": ll_runs["constants"].corpus_id == "calibration"
        and split_runs["constants"].corpus_id == "calibration",
        "log_estimate_on_validation": all(ll_ok),
        "final_corollary_on_validation": all(split_ok),
    }
    detail = (f"partition {part:.1e}, reconstruction {rec:.1e}, plancherel {pl:.1e}, "
              f"validation {sum(ll_ok)}/{len(ll_ok)} and {sum(split_ok)}/{len(split_ok)}")
    assert criterion(7, checks, detail), checks


def test_criterion_8_global_estimates(criterion):
    from sharplog.minimizer import minimizer_profile

    u = minimizer_profile(coefficients_from_contact(0.5, 0.25))
    scal = max(ge.rescale_check(u, R, 0.5).scaling_defect for R in (0.1, 2.0, 10.0))
    checks = {"scaling<1e-8": scal < 1e-8, "bookkeeping": ge.bookkeeping_holds()}
    items = dy.corpus("calibration") + dy.corpus("validation")
    for mu in (0.25, 0.5, 1.0):
        mx = ge.build_phi_mu(mu).constraint_maxima()
        checks[f"|grad phi|<=1(mu={mu})"] = mx["grad_max"] <= 1.0
        checks[f"|lap phi|<=1(mu={mu})"] = mx["lap_max"] <= 1.0
        reps = [ge.verify_global_log(it.profile, it.alpha, mu=mu) for it in items]
        for key in ("bound_I", "bound_II", "bound_III", "corollary"):
            checks[f"{key}(mu={mu})"] = all(r.checks()[key] for r in reps)
    mx = ge.build_phi_mu(1.0).constraint_maxima()
    detail = f"scaling {scal:.1e}, |grad phi| {mx['grad_max']:.4f}, |lap phi| {mx['lap_max']:.4f}"
    assert criterion(8, checks, detail), checks


@pytest.mark.slow
def test_criterion_9_report_all(criterion, tmp_path):
    runs = []
    for name in ("a", "b"):
        t0 = time.perf_counter()
        code = main(["report-all", "--output", str(tmp_path / name)])
        runs.append((code, time.perf_counter() - t0))
    a, b = tmp_path / "a", tmp_path / "b"
    files = sorted(p.relative_to(a) for p in a.rglob("*") if p.is_file() and p.name != "timing.json")
    same = bool(files) and all((b / f).exists() and (a / f).read_bytes() == (b / f).read_bytes() for f in files)
    same &= len(files) == sum(1 for p in b.rglob("*") if p.is_file() and p.name != "timing.json")
    checks = {
        "completed": all(code in (0, 1) for code, _ in runs),
        "under_10_minutes": all(t < 600 for _, t in runs),
        "deterministic": same,
    }
    detail = f"wall {runs[0][1]:.1f} s and {runs[1][1]:.1f} s, exit {runs[0][0]}, {len(files)} files compared"
    assert criterion(9, checks, detail), checks
