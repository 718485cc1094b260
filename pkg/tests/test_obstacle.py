import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sharplog.errors import DomainError
from sharplog.minimizer import coefficients_from_contact, minimizer_profile
from sharplog.obstacle import (PenalizationConfig, assemble, bilaplacian_obstacle, cross_validate,
                               discrete_variational_gap, interpolate, load_sign_ok, make_grid, qp_oracle,
                               solve_penalized, theta, theta_slope)
from sharplog.radial import single


@pytest.fixture(scope="module")
def grid1024():
    return make_grid(1024)


def test_theta_examples():
    assert theta(-1.0, 0.5) == 1.0
    assert theta(0.25, 0.5) == 0.5
    assert theta(1.0, 0.5) == 0.0
    with pytest.raises(DomainError):
        theta(0.0, 0.0)


@settings(max_examples=200, deadline=None)
@given(st.floats(-10, 10), st.floats(0, 10), st.floats(1e-8, 1.0))
def test_theta_properties(t, dt, eps):
    a, b = theta(t, eps), theta(t + dt, eps)
    assert 0.0 <= a <= 1.0 and 0.0 <= b <= 1.0
    assert b <= a
    assert a - b <= dt / eps * (1 + 1e-12) + 1e-12
    assert float(theta_slope(t, eps)) in (0.0, -1.0 / eps)


def test_bilaplacian_exponent():
    coef, expo = bilaplacian_obstacle(0.5, 2.0)
    assert expo == pytest.approx(0.5 - 4)
    assert coef == pytest.approx(0.5**2 * (4 - 0.5**2) * 2.0)


def test_energy_of_polynomial():
    g = make_grid(512)
    E = assemble(g)
    u = interpolate(g, single("polynomial", coeffs=[1.0, 0.0, -2.0, 0.0, 1.0]))
    assert abs(E.energy(u) / (16 * math.pi**2) - 1) < 1e-6
    assert E.energy(np.zeros(g.n_free)) == 0.0
    assert E.symmetry_defect() < 1e-14


def test_qp_matches_closed_form(grid1024):
    m = coefficients_from_contact(0.5, 0.25)
    q = qp_oracle(0.5, m.D, grid1024)
    assert abs(q.energy / m.energy - 1) < 1e-2
    assert abs(grid1024.cell_of(q.contact_radius) - grid1024.cell_of(0.5)) <= 2
    assert q.kkt_residual < 1e-8
    # any nodally feasible candidate has at least the QP energy
    E = assemble(grid1024)
    cand = interpolate(grid1024, minimizer_profile(m))
    assert E.energy(cand) >= q.energy * (1 - 1e-12)


def test_qp_near_boundary_contact(grid1024):
    m = coefficients_from_contact(0.5, 0.81)
    q = qp_oracle(0.5, m.D, grid1024)
    assert abs(grid1024.cell_of(q.contact_radius) - grid1024.cell_of(0.9)) <= 2


def test_qp_refinement_richardson():
    m = coefficients_from_contact(0.5, 0.25)
    e = [qp_oracle(0.5, m.D, make_grid(n)).energy for n in (256, 512)]
    assert abs(e[1] - e[0]) < abs(e[0] - m.energy)


def test_grading_regression():
    m = coefficients_from_contact(0.2, 0.04)
    graded = qp_oracle(0.2, m.D, make_grid(1024)).energy / m.energy - 1
    uniform = qp_oracle(0.2, m.D, make_grid(1024, kind="uniform")).energy / m.energy - 1
    assert abs(graded) < 0.03 and abs(uniform) > 0.03


def test_large_D_small_contact(grid1024):
    m = coefficients_from_contact(0.5, 0.25)
    q = qp_oracle(0.5, 10 * m.D, grid1024)
    assert q.contact_radius < 0.05
    assert q.feasibility_gap <= 1e-12


def test_variational_inequality(grid1024):
    m = coefficients_from_contact(0.5, 0.25)
    q = qp_oracle(0.5, m.D, grid1024)
    assert discrete_variational_gap(q, assemble(grid1024).A, np.random.default_rng(7)) >= -10 * 1e-8


def test_load_sign(grid1024):
    assert load_sign_ok(0.5, coefficients_from_contact(0.5, 0.25).D, grid1024)


def test_penalized_stages_run(grid1024):
    m = coefficients_from_contact(0.5, 0.25)
    path = solve_penalized(0.5, m.D, grid1024, PenalizationConfig((1e-2, 1e-3, 1e-4)), path=True)
    assert len(path.stages) == 3
    assert all(np.isfinite(path.energies()))


@pytest.mark.xfail(strict=True, reason="the penalized limit is not the obstacle minimizer: the "
                   "feasibility gap stalls near 0.158 and the energy stays about 47% low")
def test_penalized_converges_to_obstacle_solution(grid1024):
    cv = cross_validate(0.5, 0.25, grid1024)
    assert abs(cv.pen_vs_qp_rel) < 5e-3
    assert cv.gaps[-1] < 1e-6


def test_config_validation():
    with pytest.raises(DomainError):
        PenalizationConfig((1e-3, 1e-2))
    with pytest.raises(DomainError):
        make_grid(1)
    with pytest.raises(DomainError):
        qp_oracle(0.5, 0.5, make_grid(16))
