import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sharplog import dyadic as dy
from sharplog import global_est as ge
from sharplog.errors import DomainError
from sharplog.minimizer import coefficients_from_contact, minimizer_profile, sharp_constant


@pytest.fixture(scope="module")
def minimizer():
    return minimizer_profile(coefficients_from_contact(0.5, 0.25))


@pytest.fixture(scope="module")
def corpus_reports():
    items = dy.corpus("calibration") + dy.corpus("validation")
    return {mu: [(it, ge.verify_global_log(it.profile, it.alpha, mu=mu, corpus_id=it.id)) for it in items]
            for mu in (0.25, 0.5, 1.0)}


@pytest.mark.parametrize("R", [0.1, 2.0, 10.0])
def test_rescaling(minimizer, R):
    rep = ge.rescale_check(minimizer, R, 0.5)
    assert rep.scaling_defect < 1e-8
    assert rep.lap_defect < 1e-8 and rep.holder_defect < 1e-8
    assert all(rep.checks().values()), rep.checks()


def test_rescale_domain(minimizer):
    with pytest.raises(DomainError):
        ge.rescale_check(minimizer, 0.0, 0.5)
    with pytest.raises(DomainError):
        ge.rescale_check(minimizer.dilate(2.0), 2.0, 0.5)


def test_default_lambda_above_threshold():
    for a in (0.2, 0.5, 0.9):
        assert ge.default_lambda(a) > 1 / sharp_constant(a)


@pytest.mark.parametrize("mu", [0.25, 0.5, 1.0])
def test_cutoff_constraints(mu):
    c = ge.build_phi_mu(mu)
    mx = c.constraint_maxima()
    assert mx["grad_max"] <= 1.0 and mx["lap_max"] <= 1.0
    assert mx["phi_min"] >= -1e-12 and mx["phi_max"] <= 1.0 + 1e-12
    assert c.plateau == pytest.approx(3.0 / mu) and c.support == pytest.approx(8.0 / mu)
    r_in = np.linspace(0.0, c.plateau, 50)
    assert np.all(c.phi(r_in) == 1.0)
    r_out = np.linspace(c.support, 2 * c.support, 50)
    assert np.all(c.phi(r_out) == 0.0)


def test_cutoff_measured_maxima():
    mx = ge.build_phi_mu(1.0).constraint_maxima()
    assert mx["grad_max"] == pytest.approx(0.7247, abs=1e-3)
    assert mx["lap_max"] == pytest.approx(0.9266, abs=1e-3)


def test_cutoff_domain():
    for bad in (0.0, 1.5):
        with pytest.raises(DomainError):
            ge.build_phi_mu(bad)


def test_bookkeeping():
    assert ge.bookkeeping_holds()
    for p in ge.bookkeeping_polynomials().values():
        assert np.all(p(np.linspace(1e-6, 1.0, 1001)) >= -1e-15)


@settings(max_examples=50, deadline=None)
@given(st.floats(1e-3, 1.0), st.floats(0.0, 10.0), st.floats(0.0, 10.0), st.floats(0.0, 10.0))
def test_collected_bounds_below_mu_norm(mu, l2, grad, lap):
    coef = ge.cross_term_coefficients(mu)
    total = sum(c[0] * l2 + c[1] * grad + c[2] * lap for c in coef.values())
    assert total <= ge.mu_norm(mu, lap, l2, grad).value_sq * (1 + 1e-12) + 1e-300


def test_profile_inside_plateau_has_trivial_terms(minimizer):
    rep = ge.verify_global_log(minimizer, 0.5, mu=1.0)
    assert all(v == 0.0 for k, v in rep.terms.items() if k != "leading")
    assert rep.lap_mu_sq == pytest.approx(rep.lap_sq, rel=1e-12)
    assert rep.passed()


def test_wide_profile_sees_the_cutoff(minimizer):
    rep = ge.verify_global_log(minimizer.dilate(10.0), 0.5, mu=1.0)
    assert rep.terms["direct"] > 0.0
    assert rep.checks()["sup_preserved"] and rep.checks()["expansion_consistent"]


@pytest.mark.parametrize("mu", [0.25, 0.5, 1.0])
def test_corpus_checks(corpus_reports, mu):
    failed = [(it.id, {k: v for k, v in r.checks().items() if not v})
              for it, r in corpus_reports[mu] if not r.passed()]
    assert not failed
    assert all(r.margin > 0 for _, r in corpus_reports[mu])


def test_monotone_in_x():
    assert ge.monotone_in_x(2.0, 3.0, np.geomspace(1e-6, 1e3, 200))


def test_split_lambda1():
    lam = ge.default_lambda(0.5)
    lam1 = ge.split_lambda1(lam, 0.5, 0.01, 2.0)
    assert lam > lam1 * (1 + 3 * 0.01 * (1 + 2.0**2))
    with pytest.raises(DomainError):
        ge.split_lambda1(lam, 0.5, 1.0, 2.0)


def test_split_calibration(split_runs):
    k = split_runs["constants"]
    assert k.c_final >= k.safety and k.corpus_id == "calibration"
    for r in split_runs["calibration"]:
        assert r.passed(), r.checks()


def test_split_validation(split_runs):
    failed = [(it.id, {k: v for k, v in r.checks().items() if not v})
              for it, r in split_runs["validation"] if not r.passed()]
    assert not failed


def test_split_requires_constants(minimizer):
    rep = ge.verify_low_high_split(minimizer, 0.5)
    with pytest.raises(DomainError):
        rep.checks()
    assert rep.required_c_final >= 0.0
    assert math.isfinite(rep.v_step_rhs)
    with pytest.raises(DomainError):
        ge.calibrate_split([])
