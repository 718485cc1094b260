import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sharplog.errors import DomainError
from sharplog.extremal import (build_loglog_extremal, first_below, loglog_limit_estimate,
                               loglog_quotient, loglog_row, loglog_sup, sharpness_term, sharpness_value)
from sharplog.minimizer import energy_density, sharp_constant
from sharplog.radial import laplacian_radial, lipschitz_seminorm, sup_norm, weighted_l2_norm_sq


def test_sup_at_L_one():
    assert loglog_sup(1.0) == pytest.approx(3 / (4 * math.sqrt(2) * math.pi), rel=1e-14)
    fam = build_loglog_extremal(math.exp(-1))
    assert sup_norm(fam.u_profile)[0] == pytest.approx(0.16881, abs=1e-5)


@settings(max_examples=25, deadline=None)
@given(st.floats(-25.0, -1.0))
def test_branches_match(log_eps):
    fam = build_loglog_extremal(math.exp(log_eps))
    for row in fam.breakpoint_residuals():
        assert row["d0"] < 1e-9 and row["d1"] < 1e-9 * max(1.0, abs(fam.u_profile.deriv(row["r"], 1)))
    assert fam.u_profile.check_admissible(1e-12)
    assert fam.v_profile.check_admissible(1e-12)


def test_energy_close_to_one():
    fam = build_loglog_extremal(1e-8)
    e = weighted_l2_norm_sq(laplacian_radial(fam.u_profile))
    assert abs(e - 1) <= 30 / fam.L
    assert e == pytest.approx(fam.energy_closed_form, rel=1e-8)


@pytest.mark.parametrize("eps", [1e-2, 1e-4, 1e-8])
def test_lipschitz_bound(eps):
    fam = build_loglog_extremal(eps)
    bound = 2 / (math.pi * math.sqrt(2 * eps**0.5 * fam.L))
    # the slope bound is attained at the junction r = eps^(1/4), so allow rounding only
    assert lipschitz_seminorm(fam.u_profile) <= bound * (1 + 1e-12)


def test_quotient_decreases_toward_limit():
    q = [loglog_quotient(e, 0.5) for e in (1e-4, 1e-6, 1e-8)]
    assert q[0] > q[1] > q[2] > sharp_constant(0.5)


@pytest.mark.parametrize("alpha", [0.3, 0.5, 0.7])
def test_limit_estimate_reaches_sharp_constant(alpha):
    lim = loglog_limit_estimate(alpha)
    assert abs(lim.relative_excess) < 1e-4
    assert all(np.diff(lim.quotients) > 0)  # approached from below in the scaling form


def test_row_fields_consistent():
    row = loglog_row(1e-3, 0.5)
    assert row.n_alpha == pytest.approx(row.holder / math.sqrt(row.lap_l2_sq))
    assert row.holder <= row.sup**0.5 * row.lip**0.5


def test_sharpness_sequence():
    target = sharp_constant(0.5)
    H = [sharpness_value(0.5, 10**k) for k in range(2, 7)]
    assert all(np.diff(H) > 0) and H[-1] < target
    assert first_below(0.5) is not None


@pytest.mark.parametrize("n", [10, 1000, 10**5])
def test_sharpness_term_properties(n):
    s = sharpness_term(0.5, n, measure=True)
    assert s.u_n(0.0) == 1.0
    r = np.linspace(0, 1, 2001)
    assert np.all(s.u_n(r) >= 1 - s.D_n * r**0.5 - 1e-12)
    assert s.g_n == energy_density(0.5, 1 / n)
    assert abs(s.energy_quadrature / (s.D_n**2 * s.g_n) - 1) < 1e-6


def test_domain_errors():
    with pytest.raises(DomainError):
        build_loglog_extremal(0.5)
    with pytest.raises(DomainError):
        sharpness_term(0.5, 1)
    with pytest.raises(DomainError):
        loglog_row(1e-3, 1.0)
