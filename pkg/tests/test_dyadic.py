import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sharplog import dyadic as dy
from sharplog.errors import DomainError, ResolutionError, WindowError
from sharplog.experiments import gaussian_transform_error
from sharplog.extremal import build_loglog_extremal
from sharplog.minimizer import coefficients_from_contact, minimizer_profile
from sharplog.radial import laplacian_radial, single, weighted_l2_norm_sq


@pytest.fixture(scope="module")
def minimizer():
    return minimizer_profile(coefficients_from_contact(0.5, 0.25))


def test_partition_of_unity():
    cut = dy.build_cutoffs()
    assert cut.partition_residual() < 1e-10
    assert cut.homogeneous_residual() < 1e-10
    assert float(cut.chi(0.0)) == 1.0
    assert float(cut.phi(0.5)) == 0.0 and float(cut.phi(3.0)) == 0.0
    assert float(cut.inhomogeneous_sum(1.0, 14)) == pytest.approx(1.0, abs=1e-12)
    assert cut.support_violation() == 0.0


def test_gaussian_transform():
    assert gaussian_transform_error() < 1e-10


def test_hankel_grid_orthogonal():
    assert dy.hankel_grid(16.0, 512).orthogonality_defect() < 1e-10


def test_round_trip_of_polynomial():
    q = single("polynomial", coeffs=[1.0, 0.0, -2.0, 0.0, 1.0])
    back = dy.radial_fourier(dy.radial_fourier(q), "inverse")
    r = np.linspace(0.0, 1.0, 101)
    # the profile has a kink in its second derivative at r = 1, which limits the series
    assert np.abs(back(r) - q(r)).max() < 1e-3


def test_plancherel_minimizer(minimizer):
    assert abs(dy.radial_fourier(minimizer).energy() / weighted_l2_norm_sq(minimizer) - 1) < 1e-8
    # the Laplacian energy converges only at first order: Delta u ~ r^(a-2) near the origin
    lap = weighted_l2_norm_sq(laplacian_radial(minimizer))
    dev = [abs(dy.radial_fourier(minimizer, grid=dy.hankel_grid(16.0, n)).laplacian_energy() / lap - 1)
           for n in (2048, 4096)]
    assert dev[0] < 1e-2 and dev[1] == pytest.approx(dev[0] / 2, rel=0.05)


@settings(max_examples=15, deadline=None)
@given(st.floats(-1.0, 1.0), st.floats(-1.0, 1.0))
def test_plancherel_property(a, b):
    # (1 - r^2)^2 (1 + a r^2 + b r^4) vanishes to second order at r = 1
    base = np.polynomial.Polynomial([1.0, 0.0, -2.0, 0.0, 1.0])
    coeffs = (base * np.polynomial.Polynomial([1.0, 0.0, a, 0.0, b])).coef
    p = single("polynomial", coeffs=coeffs.tolist())
    F = dy.radial_fourier(p)
    l2 = weighted_l2_norm_sq(p)
    assert abs(F.energy() / l2 - 1) < 1e-8


def test_single_dominant_block():
    g = dy.hankel_grid(64.0, 2048)
    rho = g.rho
    # a spectral bump centred where phi(2^-2 rho) = 1
    H = np.exp(-((np.log2(rho) - math.log2(4 * 1.42)) / 0.05) ** 2) * rho**2
    u = dy.radial_fourier(dy.FrequencyProfile(g, rho, dy.FOURIER_FACTOR * H / rho), "inverse")
    d = dy.decompose(u, grid=g)
    e = np.array([d.block_l2(j) ** 2 for j in d.inhomogeneous_indices()])
    share = e / e.sum()
    assert share[d.inhomogeneous_indices().index(2)] > 1 - 1e-9


def test_reconstruction(minimizer):
    d = dy.decompose(minimizer)
    assert d.reconstruction_error() < 1e-4
    assert d.reconstruction_error(homogeneous=True) < 1e-4
    assert d.partition_residual() < 1e-10


def test_dilation_shifts_blocks(minimizer):
    d, d2 = dy.decompose(minimizer), dy.decompose(minimizer.dilate(2.0))
    for j in range(0, d.j_resolved):
        assert d2.block_sup(j) == pytest.approx(d.block_sup(j + 1), rel=1e-9)
    b, b2 = dy.besov_functionals(d, 0.5).bernstein_ratios, dy.besov_functionals(d2, 0.5).bernstein_ratios
    for j in range(0, d.j_resolved - 1):
        if j in b2 and j + 1 in b:
            assert b2[j] == pytest.approx(b[j + 1], rel=1e-9)


def test_cut_index_and_tail():
    assert dy.cut_index(1.0, 0.5) == 1
    assert dy.cut_index(4.0, 0.5) == 1 + math.floor(2 * math.log2(16))
    assert dy.cut_index(4.0, 0.5, "balanced") == 1 + math.ceil(math.log2(math.e + 4) / 0.5)
    assert dy.geometric_tail(0, 0.5) == pytest.approx(sum(2 ** (-j * 0.5) for j in range(400)))
    with pytest.raises(DomainError):
        dy.cut_index(0.0, 0.5)
    with pytest.raises(DomainError):
        dy.cut_index(1.0, 0.5, "other")


def test_window_errors(minimizer):
    with pytest.raises(WindowError):
        dy.decompose(minimizer.dilate(1e-4))
    with pytest.raises(WindowError):
        dy.decompose(minimizer, window=(-1, 1))
    with pytest.raises(DomainError):
        dy.decompose(minimizer, window=(0, 5))


def test_resolution_error_for_tiny_contact():
    with pytest.raises(ResolutionError):
        dy.verify_ll_estimate(minimizer_profile(coefficients_from_contact(0.3, 1e-3)), 0.3)


def test_corpora_disjoint():
    cal = {it.id for it in dy.corpus("calibration")}
    val = {it.id for it in dy.corpus("validation")}
    assert cal and val and not cal & val
    with pytest.raises(DomainError):
        dy.corpus("training")


def test_calibration_frozen_and_self_consistent(ll_runs):
    k = ll_runs["constants"]
    assert k.safety == 1.25 and k.corpus_id == "calibration"
    for r in ll_runs["calibration"]:
        assert r.passed(), r.checks()


def test_validation_corpus_passes(ll_runs):
    failed = [(it.id, {k: v for k, v in r.checks().items() if not v})
              for it, r in ll_runs["validation"] if not r.passed()]
    assert not failed
    assert all(r.prop_margin > 0 for _, r in ll_runs["validation"])


def test_poincare_branch_applies_inside_unit_ball(ll_runs):
    inside = [r for it, r in ll_runs["validation"] if r.supported_in_unit_ball]
    assert inside and all("poincare" in r.checks() for r in inside)
    outside = [r for it, r in ll_runs["validation"] if not r.supported_in_unit_ball]
    assert outside and all("poincare" not in r.checks() for r in outside)


def test_extremal_ratio_grows_as_eps_shrinks(ll_runs):
    ratios = [dy.verify_ll_estimate(build_loglog_extremal(e).u_profile, 0.5).prop_ratio for e in (1e-2, 1e-4)]
    assert ratios[1] > ratios[0]
    k = ll_runs["constants"]
    assert all(r <= k.c_prop for r in ratios)


def test_report_without_constants_refuses_checks(minimizer):
    rep = dy.verify_ll_estimate(minimizer, 0.5)
    with pytest.raises(DomainError):
        rep.checks()
    with pytest.raises(DomainError):
        dy.verify_ll_estimate(minimizer, 1.0)
    with pytest.raises(DomainError):
        dy.calibrate_ll([])
