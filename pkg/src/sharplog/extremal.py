"""Extremal families pinching the constant 8 pi^2 alpha from above.

Two families live here:

* the log-log family ``v_eps`` on ``B_2`` (and ``u_eps(r) = v_eps(2r)`` on
  the unit ball), whose double-log quotient tends to ``8 pi^2 alpha`` as
  ``eps -> 0``;
* the sequence ``u_n`` of closed-form minimizers with contact variable
  ``x_n = 1/n``, for which ``H_n`` stays below ``8 pi^2 alpha``.

The log-log quotient converges like ``1/log(1/eps)``, far too slowly to be
seen at double-precision ``eps``.  Near its kink ``u_eps`` is self-similar:
with ``rho = eps^(1/4)/2`` and ``s = r/rho``,

    u_eps(rho s) = const + phi(s) / sqrt(2 pi^2 L),
    phi(s) = -s^2/2 (s <= 1),  -log s - 1/2 (s >= 1),

so the Hölder seminorm equals ``K_alpha rho^(-alpha) / sqrt(2 pi^2 L)`` once
the inner pair dominates.  :func:`loglog_quotient_scaled` uses this to
evaluate the quotient at any ``L``, which is what :func:`loglog_limit_estimate`
extrapolates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError, InconsistentParameters
from .minimizer import (
    coefficients_from_contact,
    energy_density,
    gap_amplitude,
    gap_amplitude_legacy,
    minimizer_profile,
    sharp_constant,
)
from .radial import (
    QuadratureScheme,
    RadialProfile,
    Segment,
    holder_seminorm,
    laplacian_radial,
    lipschitz_seminorm,
    sup_norm,
    weighted_l2_norm_sq,
)
from .tolerances import TOL

PI2 = math.pi**2


def _check_eps(eps: float) -> float:
    if not TOL.eps_floor <= eps < math.exp(-1.0) + 1e-15:
        raise DomainError(f"eps must lie in [{TOL.eps_floor:g}, 1/e), got {eps}")
    return math.log(1.0 / eps)


def loglog_sup(L: float) -> float:
    """``sqrt(L/(32 pi^2)) + 1/sqrt(8 pi^2 L)``: the value at the origin."""
    return math.sqrt(L / (32 * PI2)) + 1.0 / math.sqrt(8 * PI2 * L)


def loglog_lip_bound(eps: float) -> float:
    L = math.log(1.0 / eps)
    return 2.0 / (math.pi * math.sqrt(2.0 * math.sqrt(eps) * L))


# Outer cubic (1 - r)(r - 2)^2 contributes a fixed multiple of 1/L to the energy.
_OUTER_POLY = np.polynomial.Polynomial([4.0, -8.0, 5.0, -1.0])


@lru_cache(maxsize=None)
def _outer_energy_times_L() -> float:
    """``L`` times the energy of the cubic piece on ``[1, 2]`` (exact polynomial integral)."""
    p = _OUTER_POLY
    lap = p.deriv(2) * np.polynomial.Polynomial([0, 1]) + 3 * p.deriv(1)  # r * Δp
    integrand = lap * lap * np.polynomial.Polynomial([0, 1])  # (r Δp)^2 r = (Δp)^2 r^3
    anti = integrand.integ()
    return float(anti(2.0) - anti(1.0))


def loglog_energy(L: float) -> float:
    """Exact ``||Δu_eps||^2`` as a function of ``L = log(1/eps)``."""
    return 1.0 + (4.0 + _outer_energy_times_L()) / L


@dataclass(frozen=True)
class LogLogExtremal:
    eps: float
    L: float
    v_profile: RadialProfile
    u_profile: RadialProfile

    @property
    def sup_closed_form(self) -> float:
        return loglog_sup(self.L)

    @property
    def energy_closed_form(self) -> float:
        return loglog_energy(self.L)

    def breakpoint_residuals(self) -> list[dict]:
        return self.v_profile.continuity_residuals((0, 1))


def _loglog_segments(eps: float, L: float, scale: float) -> tuple[Segment, ...]:
    """Segments of ``v_eps(scale * r)`` on ``[0, 2 / scale]``."""
    A = math.sqrt(L / (32 * PI2))
    B = 1.0 / math.sqrt(8 * PI2 * L)
    k = 1.0 / math.sqrt(8 * PI2 * eps * L)
    s2 = math.sqrt(2 * PI2 * L)
    e4 = eps**0.25
    cubic = _OUTER_POLY
    coeffs = [a * scale**n / s2 for n, a in enumerate(cubic.coef)]
    return (
        Segment(0.0, e4 / scale, "power", {"c": A + B, "k": -k * scale**2, "p": 2.0}),
        Segment(e4 / scale, 1.0 / scale, "logpow",
                {"terms": [[-math.log(scale) / s2, 0.0, 0], [-1.0 / s2, 0.0, 1]]}),
        Segment(1.0 / scale, 2.0 / scale, "polynomial", {"coeffs": coeffs}),
    )


def build_loglog_extremal(eps: float) -> LogLogExtremal:
    """Four-branch family ``v_eps`` on ``B_2`` and its dilate ``u_eps`` on ``B_1``."""
    L = _check_eps(eps)
    v = RadialProfile(2.0, _loglog_segments(eps, L, 1.0), h2_admissible=True)
    u = RadialProfile(1.0, _loglog_segments(eps, L, 2.0), h2_admissible=True)
    return LogLogExtremal(eps, L, v, u)


def double_log_factor(N: float, C0: float) -> float:
    """``log[e^3 + C0 N sqrt(log(2e + N))]``."""
    return float(np.logaddexp(3.0, math.log(C0) + math.log(N) + 0.5 * math.log(math.log(2 * math.e + N))))


@dataclass(frozen=True)
class LogLogRow:
    eps: float
    L: float
    sup: float
    lip: float
    holder: float
    lap_l2_sq: float
    n_alpha: float
    quotient: float


def loglog_row(eps: float, alpha: float, C0: float = 1.0, q: QuadratureScheme | None = None) -> LogLogRow:
    """All measured quantities of ``u_eps`` plus the double-log quotient."""
    if not 0.0 < alpha < 1.0:
        raise DomainError("alpha must lie in (0, 1)")
    if not C0 > 0.0:
        raise DomainError("C0 must be positive")
    fam = build_loglog_extremal(eps)
    u = fam.u_profile
    sup, _ = sup_norm(u)
    lip = lipschitz_seminorm(u)
    hol = holder_seminorm(u, alpha)
    E = weighted_l2_norm_sq(laplacian_radial(u), q)
    N = hol / math.sqrt(E)
    Q = E / sup**2 * double_log_factor(N, C0)
    return LogLogRow(eps, fam.L, sup, lip, hol, E, N, Q)


def loglog_quotient(eps: float, alpha: float, C0: float = 1.0) -> float:
    """Double-log quotient on ``u_eps`` with every norm measured numerically."""
    return loglog_row(eps, alpha, C0).quotient


# ------------------------------------------------------------- scaling form


def _inner_shape(S: float = 1e4) -> RadialProfile:
    """Self-similar inner shape ``phi`` on ``[0, S]``."""
    return RadialProfile(S, (
        Segment(0.0, 1.0, "power", {"c": 0.0, "k": -0.5, "p": 2.0}),
        Segment(1.0, S, "logpow", {"terms": [[-0.5, 0.0, 0], [-1.0, 0.0, 1]]}),
    ))


@lru_cache(maxsize=None)
def inner_holder_constant(alpha: float) -> float:
    """``K_alpha``: Hölder seminorm of the self-similar inner shape."""
    if not 0.0 < alpha < 1.0:
        raise DomainError("alpha must lie in (0, 1)")
    return holder_seminorm(_inner_shape(), alpha)


def loglog_holder_scaled(L: float, alpha: float) -> float:
    """Inner-pair prediction of the Hölder seminorm of ``u_eps`` at ``L``.

    Returns ``log`` of the value so that very large ``L`` stays finite.
    """
    log_rho = -L / 4 - math.log(2.0)
    return math.log(inner_holder_constant(alpha)) - alpha * log_rho - 0.5 * math.log(2 * PI2 * L)


def loglog_quotient_scaled(L: float, alpha: float, C0: float = 1.0) -> float:
    """Double-log quotient at ``L = log(1/eps)`` from the exact energy and sup and the scaled seminorm."""
    if not L >= 1.0:
        raise DomainError("L must be at least 1")
    E = loglog_energy(L)
    log_N = loglog_holder_scaled(L, alpha) - 0.5 * math.log(E)
    N = math.exp(log_N) if log_N < 700 else math.inf
    loglog = math.log(math.log(2 * math.e + N)) if math.isfinite(N) else math.log(log_N)
    factor = float(np.logaddexp(3.0, math.log(C0) + log_N + 0.5 * loglog))
    return E / loglog_sup(L) ** 2 * factor


@dataclass(frozen=True)
class LimitEstimate:
    alpha: float
    C0: float
    L: tuple[float, ...]
    quotients: tuple[float, ...]
    extrapolated: float
    target: float

    @property
    def relative_excess(self) -> float:
        return self.extrapolated / self.target - 1.0


def loglog_limit_estimate(alpha: float, C0: float = 1.0,
                          L_values=(1e3, 1e4, 1e5, 1e6, 1e7)) -> LimitEstimate:
    """Extrapolate the quotient to ``L = inf`` by a linear fit in ``log(L)/L`` and ``1/L``."""
    Ls = np.asarray(L_values, float)
    Q = np.array([loglog_quotient_scaled(L, alpha, C0) for L in Ls])
    X = np.column_stack([np.ones_like(Ls), np.log(Ls) / Ls, 1.0 / Ls])
    coef, *_ = np.linalg.lstsq(X, Q, rcond=None)
    return LimitEstimate(alpha, C0, tuple(Ls.tolist()), tuple(Q.tolist()), float(coef[0]),
                         sharp_constant(alpha))


def fit_holder_chain(alpha: float, eps_fit: float = 1e-4) -> float:
    """Constant ``C`` with ``holder(u_eps) = C L^(1/2 - alpha) eps^(-alpha/4)`` at ``eps_fit``."""
    L = math.log(1 / eps_fit)
    hol = holder_seminorm(build_loglog_extremal(eps_fit).u_profile, alpha)
    return hol / (L ** (0.5 - alpha) * eps_fit ** (-alpha / 4))


# -------------------------------------------------------- sharpness sequence


@dataclass(frozen=True)
class SharpnessSequence:
    alpha: float
    n: int
    x_n: float
    a_n: float
    D_n: float
    b_n: float
    c_n: float
    g_n: float
    H_n: float
    u_n: RadialProfile
    energy_quadrature: float | None = None
    holder_measured: float | None = None
    H_n_measured: float | None = None
    H_n_legacy_amplitude: float | None = None

    def row(self) -> dict:
        return {k: getattr(self, k) for k in (
            "n", "x_n", "D_n", "b_n", "c_n", "g_n", "H_n", "energy_quadrature",
            "holder_measured", "H_n_measured", "H_n_legacy_amplitude")}


def sharpness_value(alpha: float, n: float) -> float:
    """``H_n = D_n^2 g_n log(n^(alpha/2) + 1/sqrt(g_n))`` without building the profile."""
    x = 1.0 / n
    D = gap_amplitude(alpha, x)
    g = energy_density(alpha, x)
    return D * D * g * float(np.logaddexp(0.5 * alpha * math.log(n), -0.5 * math.log(g)))


def sharpness_term(alpha: float, n: int, measure: bool = False) -> SharpnessSequence:
    """Sequence element ``u_n`` with contact variable ``x_n = 1/n``.

    With ``measure=True`` the energy is recomputed by quadrature and the
    Hölder seminorm is measured, giving a second value of ``H_n`` in which
    ``N_alpha(u_n)`` is the measured ratio rather than ``D_n / ||Δu_n||``.
    """
    if not 0.0 < alpha < 1.0:
        raise DomainError("alpha must lie in (0, 1)")
    if int(n) != n or n < 2:
        raise DomainError("n must be an integer >= 2")
    m = coefficients_from_contact(alpha, 1.0 / n)
    prof = minimizer_profile(m)
    if abs(float(prof(0.0)) - 1.0) > 1e-14:
        raise InconsistentParameters("u_n(0) != 1")
    g = energy_density(alpha, m.x)
    H = sharpness_value(alpha, n)
    Dp = gap_amplitude_legacy(alpha, m.x)
    H_pr = Dp * Dp * g * float(np.logaddexp(0.5 * alpha * math.log(n), -0.5 * math.log(g)))
    E = hol = H_meas = None
    if measure:
        E = weighted_l2_norm_sq(laplacian_radial(prof))
        hol = holder_seminorm(prof, alpha)
        H_meas = E * math.log(n ** (alpha / 2) + hol / math.sqrt(E))
    return SharpnessSequence(alpha, int(n), m.x, m.r0, m.D, m.b, m.c, g, H, prof, E, hol, H_meas, H_pr)


def first_below(alpha: float, ns=(10, 100, 1000, 10**4, 10**5, 10**6)) -> int | None:
    """Smallest tested ``n`` from which on ``H_n < 8 pi^2 alpha`` for every later tested ``n``."""
    target = sharp_constant(alpha)
    below = [sharpness_value(alpha, n) < target for n in ns]
    for i in range(len(ns)):
        if all(below[i:]):
            return int(ns[i])
    return None
