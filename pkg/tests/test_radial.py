import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sharplog.errors import DivergenceError, DomainError
from sharplog.extremal import build_loglog_extremal
from sharplog.minimizer import coefficients_from_contact, minimizer_profile
from sharplog.radial import (BALL_AREA, QuadratureScheme, RadialProfile, Segment, derivative,
                             holder_seminorm, laplacian_radial, lipschitz_seminorm, norms, single,
                             sup_norm, weighted_l2_norm_sq)


def test_segments_must_tile():
    with pytest.raises(DomainError):
        RadialProfile(1.0, (Segment(0.0, 0.5, "polynomial", {"coeffs": [1.0]}),
                            Segment(0.6, 1.0, "polynomial", {"coeffs": [1.0]})))
    with pytest.raises(DomainError):
        RadialProfile(1.0, (Segment(0.1, 1.0, "polynomial", {"coeffs": [1.0]}),))
    with pytest.raises(DomainError):
        Segment(0.0, 1.0, "spline?", {})


def test_admissible_profile_vanishes_at_boundary():
    p = single("polynomial", coeffs=[1.0, 0.0, -2.0, 0.0, 1.0])  # (1 - r^2)^2
    assert p.check_admissible(1e-14)


def test_breakpoint_continuity_of_minimizer():
    m = coefficients_from_contact(0.5, 0.25)
    p = minimizer_profile(m)
    for row in p.continuity_residuals((0, 1, 2)):
        assert row["d0"] < 1e-10 and row["d1"] < 1e-9 and row["d2"] < 1e-8


def test_quadrature_nodes():
    q = QuadratureScheme()
    n = q.nodes
    assert n[0] == 0.0 and n[-1] == 1.0 and np.all(np.diff(n) > 0)


@pytest.mark.parametrize("alpha", np.linspace(0.1, 0.9, 9))
def test_quadrature_power_exact(alpha):
    q = QuadratureScheme()
    s = 2 * alpha - 1
    val = q.integrate(lambda r: r**s, 0.0, 1.0, exponent=s)
    assert abs(val * 2 * alpha - 1.0) < 1e-10


def test_quadrature_divergence():
    with pytest.raises(DivergenceError):
        QuadratureScheme().integrate(lambda r: r**-1.5, 0.0, 1.0, exponent=-1.5)


def test_laplacian_examples():
    r = np.linspace(0.05, 1.0, 50)
    p = single("polynomial", coeffs=[0.0, 0.0, 1.0])
    assert np.allclose(laplacian_radial(p)(r), 8.0, atol=1e-12)
    a, D = 0.5, 3.0
    p = single("power", c=1.0, k=-D, p=a)
    assert np.allclose(laplacian_radial(p)(r), -D * a * (a + 2) * r ** (a - 2), rtol=1e-12)
    b, c = 0.7, -0.3
    p = single("biharmonic_log", b=b, c=c)
    assert np.allclose(laplacian_radial(p)(r), 4 * (c - b) / r**2 + 8 * b, rtol=1e-11)


def test_laplacian_matches_finite_differences():
    m = coefficients_from_contact(0.4, 0.3)
    p = minimizer_profile(m)
    lap = laplacian_radial(p)
    r = np.array([0.2, 0.7, 0.9])
    h = 1e-4
    fd = (p(r + h) - 2 * p(r) + p(r - h)) / h**2 + 3 / r * (p(r + h) - p(r - h)) / (2 * h)
    assert np.allclose(lap(r), fd, rtol=1e-5)


def test_l2_examples():
    assert weighted_l2_norm_sq(single("polynomial", coeffs=[1.0])) == pytest.approx(math.pi**2 / 2, rel=1e-14)
    a = 0.5
    p = single("power", c=0.0, k=1.0, p=a - 2)
    assert weighted_l2_norm_sq(p) == pytest.approx(BALL_AREA / (2 * a), rel=1e-12)


def test_l2_of_minimizer_laplacian_is_closed_form():
    m = coefficients_from_contact(0.5, 0.25)
    e = weighted_l2_norm_sq(laplacian_radial(minimizer_profile(m)))
    assert abs(e / m.energy - 1) < 1e-8


def test_holder_examples():
    for a in (0.3, 0.5, 0.8):
        p = single("power", c=1.0, k=-1.0, p=a)
        assert holder_seminorm(p, a) == pytest.approx(1.0, rel=1e-9)
    assert holder_seminorm(single("polynomial", coeffs=[2.0]), 0.5) == 0.0


def test_holder_alpha_one_is_lipschitz():
    p = single("polynomial", coeffs=[1.0, 0.0, -2.0, 0.0, 1.0])
    assert abs(holder_seminorm(p, 1.0) - lipschitz_seminorm(p)) < 1e-6


def test_extremal_interpolation_bound():
    u = build_loglog_extremal(math.exp(-4)).u_profile
    for a in (0.3, 0.5, 0.7):
        rep = norms(u, a)
        assert rep.interpolation_ok()


def test_norm_report_examples():
    z = norms(single("polynomial", coeffs=[0.0]), 0.5)
    assert z.sup_norm == 0 and z.lap_l2 == 0 and z.n_alpha is None
    rep = norms(single("power", c=1.0, k=-1.0, p=0.5), 0.5)
    assert rep.sup_norm == pytest.approx(1.0) and rep.holder_seminorm == pytest.approx(1.0, rel=1e-9)
    p = minimizer_profile(coefficients_from_contact(0.5, 0.25))
    s, arg = sup_norm(p)
    assert s == pytest.approx(1.0, abs=1e-15) and arg == pytest.approx(0.0, abs=1e-12)
    rep = norms(p, 0.5)
    assert rep.n_alpha == pytest.approx(rep.holder_seminorm / rep.lap_l2)


def test_json_round_trip():
    p = minimizer_profile(coefficients_from_contact(0.3, 0.5))
    q = RadialProfile.from_json(p.to_json())
    r = np.linspace(0, 1, 101)
    assert np.array_equal(p(r), q(r))


def test_dilation():
    p = minimizer_profile(coefficients_from_contact(0.5, 0.25))
    q = p.dilate(3.0)
    r = np.linspace(0, 1, 33)
    assert q.R == 3.0 and np.allclose(q(3 * r), p(r), atol=1e-14)
    assert weighted_l2_norm_sq(laplacian_radial(q)) == pytest.approx(
        weighted_l2_norm_sq(laplacian_radial(p)), rel=1e-10)  # scale invariant in R^4


@settings(max_examples=30, deadline=None)
@given(st.floats(0.05, 0.95), st.floats(0.02, 0.9))
def test_interpolation_property(alpha, x):
    rep = norms(minimizer_profile(coefficients_from_contact(0.5, x)), alpha)
    assert rep.interpolation_ok()
    assert rep.sup_norm >= 0 and rep.l2_ball >= 0 and rep.lap_l2 > 0


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(-2, 2), min_size=2, max_size=6))
def test_derivative_of_polynomial(coeffs):
    p = single("polynomial", coeffs=coeffs)
    r = np.linspace(0, 1, 11)
    expect = np.polynomial.Polynomial(coeffs).deriv()(r)
    assert np.allclose(derivative(p)(r), expect, atol=1e-12)
