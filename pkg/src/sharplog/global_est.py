"""Whole-space and rescaled forms of the logarithmic estimates.

Three ingredients are provided: ball-radius rescaling of a profile, a smooth
radial cutoff ``phi`` with ``|phi'| <= 1`` and ``|Delta phi| <= 1`` together
with its dilates ``phi_mu(r) = phi(mu r / 2)``, and the norm

    ||u||_mu^2 = (1 + 3 mu) ||Delta u||^2 + 3 mu ||u||_{H^1}^2.

The cutoff is built from its Laplacian.  With ``w`` a smoothed sign change on
``[r1, 4]`` (positive first, negative after a switch radius ``t`` fixed by
``int s^3 w = 0``) and ``Delta phi = -k w``, the flux ``r^3 phi'`` vanishes at
both ends, ``phi`` is constant near 0 and near 4, and ``k`` is chosen so that
``phi`` drops from 1 to 0.  The constraint ``|Delta phi| <= 1`` caps the
plateau radius: for a bang-bang ``w`` the drop is
``(2 t^2 - r1^2 - 16) / 4`` with ``t^4 = (r1^4 + 256) / 2``, which reaches 1
only for ``r1`` below about 1.74.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache

import numpy as np
from numpy.polynomial import Polynomial
from scipy.interpolate import CubicHermiteSpline
from scipy.optimize import brentq
from scipy.special import roots_legendre

from .dyadic import (
    CALIBRATION_SAFETY,
    CorpusItem,
    DyadicDecomposition,
    decompose,
    series_values,
)
from .errors import ConstructionError, DomainError
from .minimizer import ScanResult, scan_constants, sharp_constant
from .radial import (
    BALL_AREA,
    QuadratureScheme,
    RadialProfile,
    Segment,
    derivative,
    holder_seminorm,
    laplacian_radial,
    norms,
    sup_norm,
)
from .tolerances import TOL

PHI_SUPPORT = 4.0


def default_lambda(alpha: float, factor: float = 1.25) -> float:
    """``factor / (8 pi^2 alpha)``, a lambda strictly above the threshold."""
    return factor / sharp_constant(alpha)


@lru_cache(maxsize=32)
def cached_scan(alpha: float, lam: float) -> ScanResult:
    return scan_constants(alpha, lam)


# ------------------------------------------------------------------ rescaling


@dataclass(frozen=True)
class RescaleReport:
    alpha: float
    R: float
    lam: float
    lap: float
    lap_R: float
    holder: float
    holder_R: float
    N: float
    N_R: float
    sup: float
    C_lambda: float
    log_lhs: float
    log_rhs: float
    log_rhs_unit: float
    loglog_rhs: float
    loglog_rhs_unit: float

    @property
    def lap_defect(self) -> float:
        return abs(self.lap_R / self.lap - 1.0)

    @property
    def holder_defect(self) -> float:
        return abs(self.holder_R * self.R**self.alpha / self.holder - 1.0)

    @property
    def scaling_defect(self) -> float:
        """``|R^alpha N_alpha(u_R) / N_alpha(u) - 1|``."""
        return abs(self.R**self.alpha * self.N_R / self.N - 1.0)

    @property
    def log_margin(self) -> float:
        return self.log_rhs - self.log_lhs

    @property
    def margin_shift(self) -> float:
        """Difference between the margins for ``u_R`` and for ``u``."""
        return abs(self.log_rhs - self.log_rhs_unit) / self.log_rhs_unit

    def checks(self) -> dict[str, bool]:
        return {
            "lap_invariant": self.lap_defect < TOL.scaling,
            "holder_scaling": self.holder_defect < TOL.scaling,
            "N_scaling": self.scaling_defect < TOL.scaling,
            "log_estimate": self.log_lhs <= self.log_rhs,
            "loglog_estimate": self.log_lhs <= self.loglog_rhs,
            "margin_invariant": self.margin_shift < TOL.scaling,
        }

    def to_json(self) -> dict:
        d = dict(self.__dict__)
        d.update(checks=self.checks(), scaling_defect=self.scaling_defect, log_margin=self.log_margin)
        return d


def rescale_check(u: RadialProfile, R: float, alpha: float, lam: float | None = None) -> RescaleReport:
    """Compare ``u`` on ``B_1`` with ``u_R(x) = u(x / R)`` on ``B_R``.

    The single-log estimate ``||u||^2 <= lambda ||Delta u||^2 log(C_lambda + R^alpha N)``
    and the double-log estimate with the sharp factor are both evaluated for
    ``u_R`` and must coincide with the ``R = 1`` values.
    """
    if R <= 0:
        raise DomainError("R must be positive")
    if not math.isclose(u.R, 1.0):
        raise DomainError("rescale_check expects a profile on the unit ball")
    lam = lam or default_lambda(alpha)
    scan = cached_scan(alpha, lam)
    base = norms(u, alpha)
    uR = u.dilate(R)
    lap_R = math.sqrt(_lap_sq(uR))
    hol_R = holder_seminorm(uR, alpha)
    N, N_R = base.holder_seminorm / base.lap_l2, hol_R / lap_R
    t_R, t_1 = R**alpha * N_R, N

    def single(lap: float, t: float) -> float:
        return lam * lap**2 * math.log(scan.C_lambda + t)

    def double(lap: float, t: float) -> float:
        inner = math.log(2.0 * math.e + t)
        return lap**2 / sharp_constant(alpha) * math.log(math.exp(3.0) + scan.C_alpha * t * math.sqrt(inner))

    sup_R = sup_norm(uR)[0]
    return RescaleReport(
        alpha=alpha, R=R, lam=lam, lap=base.lap_l2, lap_R=lap_R, holder=base.holder_seminorm,
        holder_R=hol_R, N=N, N_R=N_R, sup=sup_R, C_lambda=scan.C_lambda,
        log_lhs=sup_R**2, log_rhs=single(lap_R, t_R), log_rhs_unit=single(base.lap_l2, t_1),
        loglog_rhs=double(lap_R, t_R), loglog_rhs_unit=double(base.lap_l2, t_1),
    )


def _lap_sq(p: RadialProfile) -> float:
    from .radial import weighted_l2_norm_sq

    return weighted_l2_norm_sq(laplacian_radial(p), QuadratureScheme(R=p.R))


# -------------------------------------------------------------------- cutoff


def _step(x) -> np.ndarray:
    x = np.clip(np.asarray(x, float), 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        a = np.where(x > 0, np.exp(-1.0 / np.where(x > 0, x, 1.0)), 0.0)
        b = np.where(x < 1, np.exp(-1.0 / np.where(x < 1, 1.0 - x, 1.0)), 0.0)
    return a / (a + b)


@dataclass(frozen=True)
class CutoffShape:
    """Smooth cutoff on ``[0, 4]`` equal to 1 on ``[0, r1]``."""

    r1: float
    delta: float
    t: float
    k: float
    nodes: np.ndarray = field(repr=False)
    flux: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)

    def w(self, r) -> np.ndarray:
        r = np.asarray(r, float)
        d = self.delta
        return _step((r - self.r1) / d) * _step((PHI_SUPPORT - r) / d) * (1.0 - 2.0 * _step((r - self.t + d) / (2 * d)))

    @cached_property
    def _flux_spline(self) -> CubicHermiteSpline:
        return CubicHermiteSpline(self.nodes, self.flux, self.nodes**3 * self.w(self.nodes))

    @cached_property
    def _value_spline(self) -> CubicHermiteSpline:
        return CubicHermiteSpline(self.nodes, self.values, self._slope(self.nodes))

    def _slope(self, r: np.ndarray) -> np.ndarray:
        return -self.k * self._flux_spline(r) / r**3

    def phi(self, r) -> np.ndarray:
        r = np.asarray(r, float)
        out = np.where(r <= self.r1, 1.0, 0.0)
        mid = (r > self.r1) & (r < PHI_SUPPORT)
        out[mid] = self._value_spline(r[mid])
        return out

    def dphi(self, r) -> np.ndarray:
        r = np.asarray(r, float)
        out = np.zeros_like(r)
        mid = (r > self.r1) & (r < PHI_SUPPORT)
        out[mid] = self._slope(r[mid])
        return out

    def lap(self, r) -> np.ndarray:
        r = np.asarray(r, float)
        out = np.zeros_like(r)
        mid = (r > self.r1) & (r < PHI_SUPPORT)
        out[mid] = -self.k * self.w(r[mid])
        return out

    def profile(self) -> RadialProfile:
        segs = (
            Segment(0.0, self.r1, "polynomial", {"coeffs": [1.0]}),
            Segment(self.r1, PHI_SUPPORT, "sampled", {"nodes": self.nodes.tolist(),
                                                       "values": self.values.tolist(),
                                                       "slopes": self._slope(self.nodes).tolist()}),
        )
        return RadialProfile(PHI_SUPPORT, segs)


def _panel_nodes(a: float, b: float, n_panels: int, order: int = 8) -> tuple[np.ndarray, np.ndarray]:
    x, w = roots_legendre(order)
    edges = np.linspace(a, b, n_panels + 1)
    lo, hi = edges[:-1], edges[1:]
    r = (0.5 * (hi - lo)[:, None] * x + 0.5 * (hi + lo)[:, None]).ravel()
    wr = (0.5 * (hi - lo)[:, None] * w).ravel()
    return r, wr


def build_cutoff_shape(r1: float = 1.5, delta: float = 0.1, n_nodes: int = 20001) -> CutoffShape:
    """Construct the cutoff; raises :class:`ConstructionError` if a bound fails."""
    if not (0.0 < r1 and r1 + 4 * delta < PHI_SUPPORT and delta > 0):
        raise ConstructionError("need 0 < r1 and r1 + 4 delta < 4")
    d = delta
    rq, wq = _panel_nodes(r1, PHI_SUPPORT, 2000)

    def w_of(t):
        return _step((rq - r1) / d) * _step((PHI_SUPPORT - rq) / d) * (1.0 - 2.0 * _step((rq - t + d) / (2 * d)))

    t = brentq(lambda t: float(np.dot(wq, w_of(t) * rq**3)), r1 + 2 * d, PHI_SUPPORT - 2 * d, xtol=1e-14)
    nodes = np.linspace(r1, PHI_SUPPORT, n_nodes)
    shape = CutoffShape(r1, d, t, 1.0, nodes, np.zeros(n_nodes), np.zeros(n_nodes))
    # cumulative flux F(r) = int_{r1}^r s^3 w(s) ds by panel quadrature between nodes
    x, gw = roots_legendre(8)
    lo, hi = nodes[:-1], nodes[1:]
    pts = 0.5 * (hi - lo)[:, None] * x + 0.5 * (hi + lo)[:, None]
    inc = (0.5 * (hi - lo)[:, None] * gw * pts**3 * shape.w(pts)).sum(axis=1)
    flux = np.concatenate([[0.0], np.cumsum(inc)])
    shape = CutoffShape(r1, d, t, 1.0, nodes, flux, np.zeros(n_nodes))
    slope_pts = -shape._flux_spline(pts) / pts**3
    inc_v = (0.5 * (hi - lo)[:, None] * gw * slope_pts).sum(axis=1)
    drop = -float(np.sum(inc_v))
    if drop <= 0:
        raise ConstructionError("flux profile does not decrease")
    k = 1.0 / drop
    values = 1.0 + k * np.concatenate([[0.0], np.cumsum(inc_v)])
    values[-1] = 0.0
    shape = CutoffShape(r1, d, t, k, nodes, flux, values)
    _check_cutoff(shape)
    return shape


def _check_cutoff(shape: CutoffShape, n: int = 10**4) -> None:
    r = np.linspace(0.0, PHI_SUPPORT, n + 1)
    v, dv, lv = shape.phi(r), shape.dphi(r), shape.lap(r)
    problems = []
    if v.min() < -1e-12 or v.max() > 1.0 + 1e-12:
        problems.append(f"0 <= phi <= 1 fails ({v.min():.3g}, {v.max():.3g})")
    if np.abs(dv).max() > 1.0:
        problems.append(f"|phi'| reaches {np.abs(dv).max():.4g}")
    if np.abs(lv).max() > 1.0:
        problems.append(f"|Delta phi| reaches {np.abs(lv).max():.4g}")
    if abs(float(shape.flux[-1])) > 1e-10:
        problems.append(f"flux at r = 4 is {shape.flux[-1]:.3g}")
    if problems:
        raise ConstructionError("; ".join(problems))


@lru_cache(maxsize=4)
def default_cutoff_shape() -> CutoffShape:
    return build_cutoff_shape()


@dataclass(frozen=True)
class GlobalCutoff:
    """``phi_mu(r) = phi(mu r / 2)``: 1 on ``B_{2 r1 / mu}``, 0 outside ``B_{8 / mu}``."""

    mu: float
    shape: CutoffShape

    @property
    def plateau(self) -> float:
        return 2.0 * self.shape.r1 / self.mu

    @property
    def support(self) -> float:
        return 2.0 * PHI_SUPPORT / self.mu

    def phi(self, r) -> np.ndarray:
        return self.shape.phi(0.5 * self.mu * np.asarray(r, float))

    def dphi(self, r) -> np.ndarray:
        return 0.5 * self.mu * self.shape.dphi(0.5 * self.mu * np.asarray(r, float))

    def lap(self, r) -> np.ndarray:
        return 0.25 * self.mu**2 * self.shape.lap(0.5 * self.mu * np.asarray(r, float))

    def constraint_maxima(self, n: int = 10**4) -> dict[str, float]:
        """Grid maxima of ``phi``, ``|phi'|`` and ``|Delta phi|`` for the base cutoff."""
        r = np.linspace(0.0, PHI_SUPPORT, n + 1)
        s = self.shape
        return {"phi_max": float(s.phi(r).max()), "phi_min": float(s.phi(r).min()),
                "grad_max": float(np.abs(s.dphi(r)).max()), "lap_max": float(np.abs(s.lap(r)).max())}

    def to_json(self) -> dict:
        s = self.shape
        return {"mu": self.mu, "r1": s.r1, "delta": s.delta, "switch": s.t, "scale": s.k,
                "plateau": self.plateau, "support": self.support, **self.constraint_maxima()}


def build_phi_mu(mu: float, shape: CutoffShape | None = None) -> GlobalCutoff:
    if not 0.0 < mu <= 1.0:
        raise DomainError("mu must lie in (0, 1]")
    return GlobalCutoff(float(mu), shape or default_cutoff_shape())


# ------------------------------------------------------------------ mu norm


@dataclass(frozen=True)
class MuNorm:
    mu: float
    lap_sq: float
    h1_sq: float

    @property
    def value_sq(self) -> float:
        return (1.0 + 3.0 * self.mu) * self.lap_sq + 3.0 * self.mu * self.h1_sq

    @property
    def value(self) -> float:
        return math.sqrt(self.value_sq)


def mu_norm(mu: float, lap_sq: float, l2_sq: float, grad_sq: float) -> MuNorm:
    return MuNorm(mu, lap_sq, l2_sq + grad_sq)


def cross_term_coefficients(mu: float) -> dict[str, tuple[float, float, float]]:
    """Coefficients of ``(||u||^2, ||grad u||^2, ||Delta u||^2)`` in each cross-term bound."""
    return {
        "leading": (mu**4 / 16.0, mu**2, 1.0),
        "2(I)": (mu**2 / 4.0, 0.0, mu**2 / 4.0),
        "4(II)": (mu**3 / 4.0, mu**3 / 4.0, 0.0),
        "4(III)": (0.0, mu, mu),
    }


def bookkeeping_polynomials() -> dict[str, Polynomial]:
    """``mu``-norm coefficient minus the summed cross-term bounds, per norm."""
    mu = Polynomial([0.0, 1.0])
    l2 = mu**4 / 16.0 + mu**2 / 4.0 + mu**3 / 4.0
    grad = mu**2 + mu**3 / 4.0 + mu
    lap = 1.0 + mu**2 / 4.0 + mu
    return {"l2": 3.0 * mu - l2, "grad": 3.0 * mu - grad, "lap": (1.0 + 3.0 * mu) - lap}


def bookkeeping_holds() -> bool:
    """Each difference polynomial is nonnegative on ``(0, 1]``.

    A polynomial with no root in ``(0, 1]`` and a positive value at 1 is
    positive there; roots are found exactly from the coefficients.
    """
    for p in bookkeeping_polynomials().values():
        roots = p.roots()
        real = roots[np.abs(roots.imag) < 1e-12].real
        inside = real[(real > 1e-12) & (real <= 1.0)]
        if inside.size or p(1.0) < 0 or p(0.5) < 0:
            return False
    return True


# ------------------------------------------------------ whole-space estimate


def _gl_integral(f, a: float, b: float, breaks=(), panels: int = 64, order: int = 16) -> float:
    if b <= a:
        return 0.0
    cuts = np.unique(np.concatenate([np.linspace(a, b, panels + 1), [x for x in breaks if a < x < b]]))
    x, w = roots_legendre(order)
    lo, hi = cuts[:-1], cuts[1:]
    r = (0.5 * (hi - lo)[:, None] * x + 0.5 * (hi + lo)[:, None]).ravel()
    wr = (0.5 * (hi - lo)[:, None] * w).ravel()
    return float(np.dot(wr, f(r)))


def cutoff_product(u: RadialProfile, cut: GlobalCutoff, n_nodes: int = 4001) -> RadialProfile:
    """``u_mu = phi_mu u`` as a profile: ``u`` itself up to the plateau radius,
    sampled cubic Hermite data beyond it."""
    a = cut.plateau
    if u.R <= a:
        return u
    b = min(u.R, cut.support)
    segs = []
    for s in u.segments:
        if s.lo >= a:
            break
        segs.append(Segment(s.lo, min(s.hi, a), s.kind, s.params))
    r = np.linspace(a, b, n_nodes)
    v = cut.phi(r) * u(r)
    dv = cut.dphi(r) * u(r) + cut.phi(r) * u.deriv(r, 1)
    segs.append(Segment(a, b, "sampled", {"nodes": r.tolist(), "values": v.tolist(), "slopes": dv.tolist()}))
    if b < u.R:
        segs.append(Segment(b, u.R, "polynomial", {"coeffs": [0.0]}))
    return RadialProfile(u.R, tuple(segs))


@dataclass
class GlobalLogReport:
    alpha: float
    lam: float
    mu: float
    C_lambda: float
    sup: float
    sup_mu: float
    holder_mu: float
    c_alpha_norm: float
    l2_sq: float
    grad_sq: float
    lap_sq: float
    lap_mu_sq: float
    lap_mu_sq_expanded: float
    terms: dict
    bounds: dict
    mu_norm_sq: float
    lhs: float
    rhs: float
    intermediate_rhs: float
    corpus_id: str = ""

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs

    def checks(self) -> dict[str, bool]:
        t, b = self.terms, self.bounds
        slack = 1e-12 * max(self.lap_sq, self.l2_sq, 1.0)
        return {
            "sup_preserved": abs(self.sup_mu - self.sup) <= 1e-12 * max(self.sup, 1.0),
            "holder_dominated": self.holder_mu <= self.c_alpha_norm,
            "expansion_consistent": abs(self.lap_mu_sq - self.lap_mu_sq_expanded)
            <= 1e-8 * max(self.lap_mu_sq, 1e-300),
            "bound_leading": t["leading"] <= b["leading"] + slack,
            "bound_I": t["I"] <= b["I"] + slack,
            "bound_II": t["II"] <= b["II"] + slack,
            "bound_III": t["III"] <= b["III"] + slack,
            "mu_norm_dominates": self.lap_mu_sq <= self.mu_norm_sq,
            "intermediate": self.lhs <= self.intermediate_rhs,
            "corollary": self.lhs <= self.rhs,
        }

    def passed(self) -> bool:
        return all(self.checks().values())

    def to_json(self) -> dict:
        d = dict(self.__dict__)
        d.update(checks=self.checks(), margin=self.margin,
                 constants_used={"lambda": self.lam, "C_lambda": self.C_lambda, "mu": self.mu})
        return d


def verify_global_log(u: RadialProfile, alpha: float, lam: float | None = None, mu: float = 1.0,
                      shape: CutoffShape | None = None, corpus_id: str = "") -> GlobalLogReport:
    """Evaluate the whole-space estimate for ``u`` (extended by zero).

    ``||Delta(phi_mu u)||^2`` is computed directly and through the expansion
    ``leading + 2(I) + 4(II) + 4(III)``; every cross-term bound is compared with
    its quadrature value; both sides of the corollary are returned.
    """
    lam = lam or default_lambda(alpha)
    scan = cached_scan(alpha, lam)
    cut = build_phi_mu(mu, shape)
    rep = norms(u, alpha)
    l2_sq, grad_sq, lap_sq = rep.l2_ball**2, rep.grad_l2**2, rep.lap_l2**2
    a, b = cut.plateau, min(u.R, cut.support)
    breaks = [x for x in u.breakpoints if a < x < b]
    lapu = laplacian_radial(u)
    du = derivative(u)

    def integ(f) -> float:
        return BALL_AREA * _gl_integral(lambda r: f(r) * r**3, a, b, breaks, panels=256)

    if u.R > a:
        uu = lambda r: u(r)  # noqa: E731
        terms = {
            "u_lapphi": integ(lambda r: (uu(r) * cut.lap(r)) ** 2),
            "phi_lapu": integ(lambda r: (cut.phi(r) * lapu(r)) ** 2),
            "grad": integ(lambda r: (cut.dphi(r) * du(r)) ** 2),
            "I": integ(lambda r: cut.lap(r) * uu(r) * cut.phi(r) * lapu(r)),
            "II": integ(lambda r: cut.lap(r) * uu(r) * cut.dphi(r) * du(r)),
            "III": integ(lambda r: cut.phi(r) * lapu(r) * cut.dphi(r) * du(r)),
            "direct": integ(lambda r: (uu(r) * cut.lap(r) + cut.phi(r) * lapu(r)
                                       + 2.0 * cut.dphi(r) * du(r)) ** 2),
            "lapu_outer": BALL_AREA * _gl_integral(lambda r: lapu(r) ** 2 * r**3, a, u.R,
                                                   [x for x in u.breakpoints if a < x < u.R], panels=256),
        }
    else:
        terms = dict.fromkeys(("u_lapphi", "phi_lapu", "grad", "I", "II", "III", "direct", "lapu_outer"), 0.0)
    inner = lap_sq - terms["lapu_outer"]
    lap_mu_sq = inner + terms["direct"]
    expanded = inner + terms["u_lapphi"] + terms["phi_lapu"] + 4.0 * terms["grad"] \
        + 2.0 * terms["I"] + 4.0 * terms["II"] + 4.0 * terms["III"]
    leading_val = inner + terms["u_lapphi"] + terms["phi_lapu"] + 4.0 * terms["grad"]
    coef = cross_term_coefficients(mu)

    def bound(key: str, scale: float = 1.0) -> float:
        c = coef[key]
        return (c[0] * l2_sq + c[1] * grad_sq + c[2] * lap_sq) / scale

    terms["leading"] = leading_val
    bounds = {"leading": bound("leading"), "I": bound("2(I)", 2.0), "II": bound("4(II)", 4.0),
              "III": bound("4(III)", 4.0)}
    um = cutoff_product(u, cut)
    sup_mu = sup_norm(um)[0]
    hol_mu = holder_seminorm(um, alpha)
    c_alpha = rep.sup_norm + rep.holder_seminorm
    mn = mu_norm(mu, lap_sq, l2_sq, grad_sq)
    arg = 8.0**alpha * mu**-alpha * c_alpha
    lhs = rep.sup_norm**2
    rhs = lam * mn.value_sq * math.log(scan.C_lambda + arg / mn.value)
    lap_mu = math.sqrt(lap_mu_sq)
    intermediate = lam * lap_mu_sq * math.log(scan.C_lambda + arg / lap_mu)
    return GlobalLogReport(
        alpha=alpha, lam=lam, mu=mu, C_lambda=scan.C_lambda, sup=rep.sup_norm, sup_mu=sup_mu,
        holder_mu=hol_mu, c_alpha_norm=c_alpha, l2_sq=l2_sq, grad_sq=grad_sq, lap_sq=lap_sq,
        lap_mu_sq=lap_mu_sq, lap_mu_sq_expanded=expanded, terms=terms, bounds=bounds,
        mu_norm_sq=mn.value_sq, lhs=lhs, rhs=rhs, intermediate_rhs=intermediate, corpus_id=corpus_id,
    )


def monotone_in_x(C_lambda: float, C: float, x: np.ndarray) -> bool:
    """``x -> x^2 log(C_lambda + C / x)`` is increasing on the sampled ``x``."""
    x = np.sort(np.asarray(x, float))
    v = x * x * np.log(C_lambda + C / x)
    return bool(np.all(np.diff(v) > 0))


# --------------------------------------------------------- low/high split


@dataclass(frozen=True)
class SplitConstants:
    """Constants of the low/high split, fitted on a calibration corpus and frozen."""

    c_low: float
    c_h1: float
    c_final: float
    lam: float
    lam1: float
    mu1: float
    safety: float
    corpus_id: str

    def to_json(self) -> dict:
        return dict(self.__dict__)


@dataclass
class SplitReport:
    alpha: float
    lam: float
    lam1: float
    mu1: float
    C_lambda1: float
    sup: float
    l2: float
    lap: float
    c_alpha_norm: float
    low_sup: float
    v_sup: float
    v_at_zero: float
    v_l2: float
    v_grad: float
    v_lap: float
    v_mu1: float
    low_ratio: float
    h1_ratio: float
    v_step_rhs: float
    required_c_final: float
    constants: SplitConstants | None = None

    @property
    def chain_rhs(self) -> float:
        """``c_low ||u|| + sqrt(1 + 3 mu1 (1 + c_h1^2)) ||Delta v|| sqrt(lambda1 log(...))``."""
        k = self.constants
        factor = math.sqrt(1.0 + 3.0 * self.mu1 * (1.0 + k.c_h1**2))
        scale = factor * self.v_lap
        arg = 8.0**self.alpha * self.mu1**-self.alpha * self.c_alpha_norm
        return k.c_low * self.l2 + scale * math.sqrt(self.lam1 * math.log(self.C_lambda1 + arg / scale))

    @property
    def final_rhs(self) -> float:
        k = self.constants
        return self.l2 + self.lap * math.sqrt(self.lam * math.log(math.e + k.c_final * self.c_alpha_norm / self.lap))

    def checks(self) -> dict[str, bool]:
        if self.constants is None:
            raise DomainError("report has no frozen constants attached")
        k = self.constants
        return {
            "low_bernstein": self.low_sup <= k.c_low * self.l2,
            "low_unit_constant": self.low_sup <= self.l2,
            "h1_poincare": self.h1_ratio <= k.c_h1,
            "triangle": self.sup <= (self.low_sup + self.v_sup) * (1 + 1e-12),
            "v_step": self.v_sup <= self.v_step_rhs,
            "chain": self.sup <= self.chain_rhs,
            "final": self.sup <= self.final_rhs,
        }

    def passed(self) -> bool:
        return all(self.checks().values())

    def to_json(self) -> dict:
        d = {k: v for k, v in self.__dict__.items() if k != "constants"}
        if self.constants is not None:
            d.update(constants=self.constants.to_json(), checks=self.checks(),
                     chain_rhs=self.chain_rhs, final_rhs=self.final_rhs)
        return d


def split_lambda1(lam: float, alpha: float, mu1: float, c_h1: float) -> float:
    """``lambda1 = 0.99 lambda / (1 + 3 mu1 (1 + c_h1^2))``, which satisfies
    ``lambda > lambda1 (1 + 3 mu1 (1 + c_h1^2))``; it must exceed the threshold."""
    lam1 = 0.99 * lam / (1.0 + 3.0 * mu1 * (1.0 + c_h1**2))
    if not lam1 > 1.0 / sharp_constant(alpha):
        raise DomainError(f"mu1 = {mu1} leaves no admissible lambda1 below lambda = {lam:.6g}")
    return lam1


def verify_low_high_split(u: RadialProfile, alpha: float, lam: float | None = None,
                          constants: SplitConstants | None = None, mu1: float = 0.01,
                          lam1: float | None = None, decomposition: DyadicDecomposition | None = None) -> SplitReport:
    """Measure the chain ``u = D_-1 u + v`` behind the final whole-space estimate.

    ``v`` norms come from the spectrum; ``||v||_inf`` is measured directly.
    The step for ``v`` uses the whole-space log estimate with ``C_lambda1``
    from the contact scan, where ``lambda1`` is tied to ``lambda`` through the
    a priori bound ``||v||_{H^1} <= c ||Delta v||`` that follows from the
    spectrum of ``v`` lying in ``rho >= inner``.  ``required_c_final`` is the smallest constant for
    which the final inequality holds for ``u`` (0 when any positive constant
    works).
    """
    lam = lam or default_lambda(alpha)
    mu1 = constants.mu1 if constants else mu1
    d = decomposition or decompose(u)
    lam1 = lam1 or split_lambda1(lam, alpha, mu1, h1_bound_from_cutoff(d.cutoffs.inner))
    scan = cached_scan(alpha, lam1)
    rep = norms(u, alpha)
    spec = d.spectrum
    high = 1.0 - d.cutoffs.chi(spec.rho)
    H = spec.hankel_values * high
    w = d.grid.weights_rho
    v_l2 = math.sqrt(BALL_AREA * float(np.dot(w, H * H)))
    v_grad = math.sqrt(BALL_AREA * float(np.dot(w, (spec.rho * H) ** 2)))
    v_lap = math.sqrt(BALL_AREA * float(np.dot(w, (spec.rho**2 * H) ** 2)))
    low_sup = d.block_sup(-1)
    v_sup = d.remainder_sup(0)
    v0 = float(u(0.0) - series_values(d.grid, d.block_hankel(-1), [0.0])[0])
    c_alpha = rep.sup_norm + rep.holder_seminorm
    mn = mu_norm(mu1, v_lap**2, v_l2**2, v_grad**2)
    arg = 8.0**alpha * mu1**-alpha * c_alpha
    v_rhs = mn.value * math.sqrt(lam1 * math.log(scan.C_lambda + arg / mn.value))
    lap = rep.lap_l2
    need = ((rep.sup_norm - rep.l2_ball) / lap) ** 2 / lam if rep.sup_norm > rep.l2_ball else 0.0
    req = max(0.0, (math.exp(need) - math.e) * lap / c_alpha) if need > 1.0 else 0.0
    return SplitReport(
        alpha=alpha, lam=lam, lam1=lam1, mu1=mu1, C_lambda1=scan.C_lambda, sup=rep.sup_norm,
        l2=rep.l2_ball, lap=lap, c_alpha_norm=c_alpha, low_sup=low_sup, v_sup=v_sup, v_at_zero=v0,
        v_l2=v_l2, v_grad=v_grad, v_lap=v_lap, v_mu1=mn.value, low_ratio=low_sup / rep.l2_ball,
        h1_ratio=math.sqrt(v_l2**2 + v_grad**2) / v_lap, v_step_rhs=v_rhs, required_c_final=req,
        constants=constants,
    )


def h1_bound_from_cutoff(inner: float) -> float:
    """``sup_{rho >= inner} sqrt(rho^-4 + rho^-2)``, an a priori bound for ``||v||_{H^1} / ||Delta v||``."""
    return math.sqrt(inner**-4 + inner**-2)


def calibrate_split(reports, safety: float = CALIBRATION_SAFETY,
                    corpus_id: str = "calibration") -> SplitConstants:
    reports = list(reports)
    if not reports:
        raise DomainError("calibration needs at least one report")
    r0 = reports[0]
    c_low = safety * max(r.low_ratio for r in reports)
    c_h1 = safety * max(r.h1_ratio for r in reports)
    c_final = safety * max(1.0, max(r.required_c_final for r in reports))
    return SplitConstants(c_low, c_h1, c_final, r0.lam, r0.lam1, r0.mu1, safety, corpus_id)


def attach_split(reports, constants: SplitConstants) -> list[SplitReport]:
    for r in reports:
        r.constants = constants
    return list(reports)


def global_corpus(name: str) -> list[CorpusItem]:
    """Same declared corpora as the dyadic module."""
    from .dyadic import corpus

    return corpus(name)


__all__ = [
    "PHI_SUPPORT", "default_lambda", "cached_scan", "RescaleReport", "rescale_check", "CutoffShape",
    "build_cutoff_shape", "default_cutoff_shape", "GlobalCutoff", "build_phi_mu", "MuNorm", "mu_norm",
    "cross_term_coefficients", "bookkeeping_polynomials", "bookkeeping_holds", "cutoff_product",
    "GlobalLogReport", "verify_global_log", "monotone_in_x", "SplitConstants", "SplitReport",
    "verify_low_high_split", "split_lambda1", "h1_bound_from_cutoff", "calibrate_split", "attach_split", "global_corpus",
]
