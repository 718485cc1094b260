"""Closed-form minimizer of ||Δu||^2 over the obstacle set K_D on the unit ball.

For an obstacle amplitude D > 1 the set ``K_D`` contains the radial H^2_0(B)
functions with ``u(r) >= 1 - D r^alpha``.  The minimizer coincides with the
obstacle on ``[0, r0]`` and is biharmonic on ``(r0, 1]``; writing ``x = r0^2``
everything is parametrised by the contact variable ``x``:

* ``b(x), c(x)`` solve the slope and curvature matching equations at ``r0``;
* ``D(x)`` then follows from the value matching equation;
* ``||Δu*||^2 = D(x)^2 g(x)``.

The amplitude is evaluated as ``4 (x-1)^2 / (x^(alpha/2) den(x))`` where
``den`` is the denominator obtained by substituting ``b`` and ``c`` into the
value equation.  Near ``x = 1`` both ``den`` and the bracket of ``g`` are
evaluated from their Taylor series in ``y = x - 1``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable, NamedTuple, Sequence

import numpy as np
from scipy.optimize import brentq

from .errors import (
    BracketError,
    DegenerateContactError,
    DomainError,
    InconsistentParameters,
    ScanFailure,
)
from .radial import RadialProfile, Segment, QuadratureScheme, laplacian_radial, weighted_l2_norm_sq
from .tolerances import TOL

PI2 = math.pi**2
E3 = 3.0  # log(e^3)


def sharp_constant(alpha: float) -> float:
    """The double-log constant 8 pi^2 alpha."""
    return 8.0 * PI2 * alpha


def _check_alpha(alpha: float) -> None:
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")


def _check_x(x, closed: bool = False) -> np.ndarray:
    arr = np.asarray(x, float)
    hi_ok = (arr <= 1.0) if closed else (arr < 1.0)
    if not ((arr > 0.0) & hi_ok).all():
        raise DomainError(f"contact variable x must lie in (0, 1{']' if closed else ')'}")
    return arr


# ----------------------------------------------------------- series near x = 1


def _den_series(alpha: float, y: np.ndarray) -> np.ndarray:
    """den(1 + y) / y^2."""
    a = alpha
    c = [4.0, -4 * a / 3, a * (a + 4) / 6, -a * (5 * a + 14) / 30, a * (9 * a + 22) / 60,
         -2 * a * (7 * a + 16) / 105, a * (5 * a + 11) / 42]
    return np.polynomial.polynomial.polyval(y, c)


def _gbracket_series(alpha: float, y: np.ndarray) -> np.ndarray:
    """y times the bracket of g at x = 1 + y."""
    a = alpha
    a2 = a * a
    c = [-16 * a2 / 3, a * (7 * a2 - 8 * a + 12) / 3, -a2 * (5 * a2 + 28) / 15,
         a2 * (5 * a2 + 16 * a + 28) / 30, -2 * a2 * (7 * a2 + 28 * a + 36) / 105,
         a2 * (49 * a2 + 204 * a + 236) / 420, -a2 * (33 * a2 + 138 * a + 152) / 315]
    return np.polynomial.polynomial.polyval(y, c)


# ------------------------------------------------------------ scalar formulas


def gap_denominator(alpha: float, x) -> np.ndarray:
    """Denominator ``den(x)`` of the amplitude, from the value matching equation."""
    x = np.asarray(x, float)
    y = x - 1.0
    L = np.log(x)
    a = alpha
    direct = 4 * y**2 + a * (a * ((x * x - 1) * L - 2 * y**2) - 2 * (x * x + 1) * L + 2 * (x * x - 1))
    near = np.abs(y) < TOL.series_switch
    if np.any(near):
        direct = np.where(near, y**2 * _den_series(a, y), direct)
    return direct


def gap_amplitude(alpha: float, x) -> np.ndarray | float:
    """``D(x)``: obstacle amplitude whose minimizer has contact radius ``sqrt(x)``."""
    _check_alpha(alpha)
    scalar = np.ndim(x) == 0
    x = _check_x(x)
    y = x - 1.0
    near = np.abs(y) < TOL.series_switch
    den = gap_denominator(alpha, x)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(near, 4.0 / _den_series(alpha, y), 4.0 * y**2 / den)
    if np.any(np.abs(den) < TOL.degenerate_denominator) and not np.all(near):
        raise DegenerateContactError("amplitude denominator vanishes")
    out = ratio * np.exp(-0.5 * alpha * np.log(x))
    return float(out) if scalar else out


def gap_amplitude_legacy(alpha: float, x) -> np.ndarray | float:
    """An older closed form of the amplitude, with a different denominator.

    Kept for comparison only: it has the same limits at ``x -> 0`` and
    ``x -> 1`` as :func:`gap_amplitude` but does not satisfy the value
    matching equation at ``r0``.
    """
    _check_alpha(alpha)
    scalar = np.ndim(x) == 0
    x = _check_x(x)
    a = alpha
    den = 4 * (x - 1) ** 2 + a * (2 + a * (1 - x)) * (x - 1 - np.log(x)) \
        + a * ((a - 2) * (1 - x) - 2) * (1 - x + x * np.log(x))
    out = 4 * (x - 1) ** 2 / (x ** (a / 2) * den)
    return float(out) if scalar else out


def h_series_argument(alpha: float, y) -> np.ndarray | float:
    """``den(1 + y)``: the amplitude denominator as a function of ``y = x - 1``."""
    scalar = np.ndim(y) == 0
    out = gap_denominator(alpha, 1.0 + np.asarray(y, float))
    return float(out) if scalar else out


def h_legacy(alpha: float, y) -> np.ndarray | float:
    """``4y^2 + a(2 - a y)(y - log(1+y)) - a((a-2)y + 2)(-y + (1+y) log(1+y))``."""
    y = np.asarray(y, float)
    a = alpha
    l1 = np.log1p(y)
    out = 4 * y**2 + a * (2 - a * y) * (y - l1) - a * ((a - 2) * y + 2) * (-y + (y + 1) * l1)
    return float(out) if out.ndim == 0 else out


def energy_density(alpha: float, x) -> np.ndarray | float:
    """``g(x)`` with ``||Δu*||^2 = D(x)^2 g(x)``."""
    _check_alpha(alpha)
    scalar = np.ndim(x) == 0
    x = _check_x(x, closed=False)
    a = alpha
    y = x - 1.0
    near = np.abs(y) < TOL.series_switch
    with np.errstate(divide="ignore", invalid="ignore"):
        L = np.log(x)
        direct = (a * (a + 2) ** 2 - a * a * L * (a + 2 - (a - 2) * x * x) ** 2 / (1 - x) ** 4
                  + 2 * a * a / (1 - x) ** 3 * (a + 2 - a * x) * ((a - 4) * x * x + 2 * x - a - 2))
        series = _gbracket_series(a, y) / y
    bracket = np.where(near, series, direct)
    out = PI2 * np.exp(a * np.log(x)) * bracket
    return float(out) if scalar else out


def det_A(r0: float) -> float:
    """Closed form ``-(8 / r0^5)(r0^2 - 1)^2`` of the slope/curvature matrix determinant."""
    if not 0.0 < r0 < 1.0:
        raise DomainError("r0 must lie in (0, 1)")
    return -8.0 / r0**5 * (r0 * r0 - 1.0) ** 2


def matrix_A(r0: float) -> np.ndarray:
    """Slope and curvature rows of the matching system, acting on (b, c)."""
    return np.array([
        [2 * (r0 - 1 / r0), 2 / r0 * (1 - 1 / r0**2)],
        [2 * (1 + 1 / r0**2), 2 / r0**2 * (3 / r0**2 - 1)],
    ])


def matching_system(alpha: float, r0: float) -> tuple[np.ndarray, np.ndarray]:
    """Full 3x3 linear system in (b, c, D) expressing C^2 matching at ``r0``."""
    a = alpha
    lr = math.log(r0)
    M = np.array([
        [r0 * r0 - 1 - 2 * lr, 1 / r0**2 - 1 + 2 * lr, r0**a],
        [2 * (r0 - 1 / r0), 2 / r0 * (1 - 1 / r0**2), a * r0 ** (a - 1)],
        [2 * (1 + 1 / r0**2), 2 / r0**2 * (3 / r0**2 - 1), a * (a - 1) * r0 ** (a - 2)],
    ])
    rhs = np.array([1.0, 0.0, 0.0])
    return M, rhs


# ---------------------------------------------------------------- the record


@dataclass(frozen=True)
class MinimizerClosedForm:
    alpha: float
    x: float
    r0: float
    D: float
    b: float
    c: float

    def matching_residuals(self) -> tuple[float, float, float]:
        """Relative residuals of value, slope and curvature matching at r0."""
        a, D, r0, b, c = self.alpha, self.D, self.r0, self.b, self.c
        lr = math.log(r0)
        rows = [
            (1 - D * r0**a, (r0 * r0 - 1 - 2 * lr) * b + (1 / r0**2 - 1 + 2 * lr) * c),
            (-a * D * r0 ** (a - 1), 2 * (r0 - 1 / r0) * b + 2 / r0 * (1 - 1 / r0**2) * c),
            (-a * (a - 1) * D * r0 ** (a - 2), 2 * (1 + 1 / r0**2) * b + 2 / r0**2 * (3 / r0**2 - 1) * c),
        ]
        return tuple(abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1e-300) for lhs, rhs in rows)

    def boundary_residuals(self) -> tuple[float, float]:
        """``|u*(1)|`` and ``|u*'(1)|`` from the biharmonic piece."""
        seg = self.profile().segments[-1]
        one = np.array([1.0])
        return float(abs(seg.deriv(one, 0)[0])), float(abs(seg.deriv(one, 1)[0]))

    @property
    def energy(self) -> float:
        return self.D**2 * energy_density(self.alpha, self.x)

    def profile(self) -> RadialProfile:
        return minimizer_profile(self, check=False)

    def to_json(self) -> dict:
        return asdict(self)


def coefficients_from_contact(alpha: float, x: float) -> MinimizerClosedForm:
    """Minimizer parameters for contact variable ``x = r0^2``."""
    _check_alpha(alpha)
    if not 0.0 < x < 1.0:
        raise DomainError(f"x must lie in (0, 1), got {x}")
    den = float(gap_denominator(alpha, x))
    if abs(den) < TOL.degenerate_denominator:
        raise DegenerateContactError(f"amplitude denominator {den:g} at x = {x}")
    D = float(gap_amplitude(alpha, x))
    a = alpha
    xa = x ** (a / 2)
    b = a * D / 4 * xa / (1 - x) * (a + 2 / (1 - x))
    c = a * D / 4 * xa * x / (x - 1) * (a - 2 + 2 / (1 - x))
    return MinimizerClosedForm(alpha, x, math.sqrt(x), D, b, c)


def minimizer_profile(m: MinimizerClosedForm, check: bool = True, n_check: int = 2001) -> RadialProfile:
    """Two-piece profile: obstacle on ``[0, r0]``, biharmonic on ``[r0, 1]``."""
    segs = (
        Segment(0.0, m.r0, "power", {"c": 1.0, "k": -m.D, "p": m.alpha}),
        Segment(m.r0, 1.0, "biharmonic_log", {"b": m.b, "c": m.c}),
    )
    prof = RadialProfile(1.0, segs, h2_admissible=True, continuous=True)
    if check:
        r = np.linspace(m.r0, 1.0, n_check)
        gap = prof(r) - (1.0 - m.D * r**m.alpha)
        worst = float(-gap.min())
        if worst > TOL.feasibility * max(1.0, m.D):
            raise InconsistentParameters(f"u* dips below the obstacle by {worst:g}")
        jumps = prof.continuity_residuals((0, 1, 2))
        if any(v > TOL.continuity * max(1.0, m.D / m.r0**2) for row in jumps for k, v in row.items() if k != "r"):
            raise InconsistentParameters(f"matching failed at r0: {jumps}")
    return prof


def energy_by_quadrature(m: MinimizerClosedForm, q: QuadratureScheme | None = None) -> float:
    return weighted_l2_norm_sq(laplacian_radial(m.profile()), q)


# ------------------------------------------------------------- energy curves


def _log_e3_plus(log_term: np.ndarray) -> np.ndarray:
    """``log(e^3 + exp(log_term))`` without overflow."""
    return np.logaddexp(E3, log_term)


@dataclass(frozen=True)
class EnergyCurves:
    """Curves in the contact variable for a fixed ``alpha``.

    ``F(x, C)`` is the double-log functional evaluated on the minimizer and
    ``H(x, C)`` the single-log one; both use ``N_alpha(u*) = 1 / sqrt(g)``.
    ``C`` may be passed as ``log_C`` for constants beyond the float range.
    """

    alpha: float

    def g(self, x):
        return energy_density(self.alpha, x)

    def D(self, x):
        return gap_amplitude(self.alpha, x)

    def energy(self, x):
        return np.asarray(self.D(x)) ** 2 * np.asarray(self.g(x))

    def F(self, x, C: float | None = None, log_C: float | None = None):
        logc = math.log(C) if log_C is None else log_C
        gx = np.asarray(self.g(x), float)
        N = 1.0 / np.sqrt(gx)
        log_term = logc + 0.5 * np.log(np.log(2 * math.e + N)) - 0.5 * np.log(gx)
        out = self.energy(x) * _log_e3_plus(log_term)
        return float(out) if np.ndim(x) == 0 else out

    def H(self, x, C: float | None = None, log_C: float | None = None):
        gx = np.asarray(self.g(x), float)
        if log_C is None:
            inner = np.log(C + 1.0 / np.sqrt(gx))
        else:
            inner = np.logaddexp(log_C, -0.5 * np.log(gx))
        out = self.energy(x) * inner
        return float(out) if np.ndim(x) == 0 else out

    def h(self, y):
        return h_series_argument(self.alpha, y)


def energy_curves(alpha: float) -> EnergyCurves:
    _check_alpha(alpha)
    return EnergyCurves(alpha)


def monotone_auxiliary(C: float, t: np.ndarray) -> np.ndarray:
    """``t^2 log(C + 1/t)``; nondecreasing in ``t`` for ``C > 1``."""
    return t * t * np.log(C + 1.0 / t)


# ------------------------------------------------------------------ the scans


@dataclass(frozen=True)
class GridSpec:
    x_min: float = 1e-12
    x_split: float = 0.5
    x_max: float = 1.0 - 1e-6
    n_log: int = 600
    n_lin: int = 200

    def points(self) -> np.ndarray:
        if not 0.0 < self.x_min < self.x_split < self.x_max < 1.0 + 1e-15:
            raise DomainError("grid must satisfy 0 < x_min < x_split < x_max <= 1")
        a = np.geomspace(self.x_min, self.x_split, self.n_log)
        b = np.linspace(self.x_split, self.x_max, self.n_lin + 1)[1:]
        return np.concatenate([a, b])


@dataclass
class ScanResult:
    alpha: float
    lam: float | None
    grid: list[tuple[float, float]]
    x_alpha: float
    y_alpha: float
    C_alpha: float
    log_C_alpha: float
    C_working: float
    infimum_estimate: float
    target: float
    x_lambda: float | None = None
    y_lambda: float | None = None
    C_lambda: float | None = None
    log_C_lambda: float | None = None
    lambda_infimum: float | None = None
    D_monotone: bool = True
    table: dict = field(default_factory=dict, repr=False)

    def to_json(self) -> dict:
        d = {k: v for k, v in self.__dict__.items() if k not in ("grid", "table")}
        d["grid_size"] = len(self.grid)
        return d


_LADDER = (1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0, 200.0, 500.0, 1e3, 1e4, 1e5, 1e6)


def _prefix_end(ok: np.ndarray) -> int:
    """Index of the last point of the leading run of True values (-1 if none)."""
    if not ok[0]:
        return -1
    bad = np.flatnonzero(~ok)
    return (bad[0] - 1) if bad.size else ok.size - 1


def scan_constants(alpha: float, lam: float | None = None,
                   grid: GridSpec | Sequence[float] | None = None) -> ScanResult:
    """Scan the contact variable and produce admissible constants.

    ``x_alpha`` is the largest grid point such that ``F_{C_w} >= 8 pi^2 alpha``
    on every grid point below it, for the smallest working constant ``C_w`` on
    a fixed ladder for which such a point exists.  ``y_alpha`` is the minimum
    of ``g`` on the grid restricted to ``[x_alpha, 1)`` and

        C_alpha = max(C_w, 1 + exp(8 pi^2 alpha / (D(x_alpha)^2 y_alpha)) / sqrt(y_alpha)).

    The bound ``F_{C_alpha} >= 8 pi^2 alpha`` is then asserted on the whole grid.
    The single-log constants are built the same way from ``lambda H >= 1``.
    """
    _check_alpha(alpha)
    xs = grid.points() if isinstance(grid, GridSpec) else np.asarray(GridSpec().points() if grid is None else grid, float)
    xs = np.unique(xs)
    target = sharp_constant(alpha)
    if xs.size < 8 or xs[0] > 1e-3 or (xs >= 1.0).any() or (xs <= 0).any():
        raise ScanFailure("grid cannot bracket the x -> 0 regime",
                          {"n": int(xs.size), "x_min": float(xs.min()), "x_max": float(xs.max())})
    if lam is not None and not lam > 1.0 / target:
        raise DomainError(f"lambda must exceed 1/(8 pi^2 alpha) = {1.0 / target:.6g}")
    curves = EnergyCurves(alpha)
    D = curves.D(xs)
    g = curves.g(xs)
    E = D * D * g

    def first_prefix(values_for_C) -> tuple[float, int]:
        for C in _LADDER:
            end = _prefix_end(values_for_C(C))
            if end >= 0:
                return C, end
        raise ScanFailure("no working constant satisfies the bound near x = 0",
                          {"ladder_max": _LADDER[-1], "x_min": float(xs[0])})

    Cw, ia = first_prefix(lambda C: curves.F(xs, C) >= target)
    x_a = float(xs[ia])
    y_a = float(g[ia:].min())
    D_a = float(D[ia])
    log_rest = math.log(math.expm1(target / (D_a * D_a * y_a)) + 1.0) if target / (D_a * D_a * y_a) < 700 \
        else target / (D_a * D_a * y_a)
    log_formula = float(np.logaddexp(0.0, log_rest - 0.5 * math.log(y_a)))
    log_Ca = max(math.log(Cw), log_formula)
    Fv = curves.F(xs, log_C=log_Ca)
    inf_F = float(Fv.min())
    if inf_F < target:
        raise ScanFailure("F_{C_alpha} falls below 8 pi^2 alpha on the grid",
                          {"x": float(xs[int(np.argmin(Fv))]), "F": inf_F, "target": target})
    res = ScanResult(
        alpha=alpha, lam=lam, grid=list(zip(xs.tolist(), Fv.tolist())),
        x_alpha=x_a, y_alpha=y_a, C_alpha=math.exp(log_Ca) if log_Ca < 700 else math.inf,
        log_C_alpha=log_Ca, C_working=Cw, infimum_estimate=inf_F, target=target,
        D_monotone=bool(np.all(np.diff(D) < 0)),
    )
    table = {"x": xs, "D": D, "g": g, "F": Fv}
    if lam is not None:
        Cl, il = first_prefix(lambda C: lam * curves.H(xs, C) >= 1.0)
        x_l = float(xs[il])
        y_l = float(g[il:].min())
        D_l = float(D[il])
        expo = 1.0 / (lam * D_l * D_l * y_l)
        log_formula = float(np.logaddexp(0.0, expo))
        log_Cl = max(math.log(Cl), log_formula)
        Hv = curves.H(xs, log_C=log_Cl)
        lam_inf = float((lam * Hv).min())
        if lam_inf < 1.0:
            raise ScanFailure("lambda H_{C_lambda} falls below 1 on the grid",
                              {"x": float(xs[int(np.argmin(Hv))]), "lambda_H": lam_inf})
        res.x_lambda, res.y_lambda = x_l, y_l
        res.log_C_lambda = log_Cl
        res.C_lambda = math.exp(log_Cl) if log_Cl < 700 else math.inf
        res.lambda_infimum = lam_inf
        table["H"] = Hv
    res.table = table
    return res


# --------------------------------------------------------------- inversions


class ContactRoot(NamedTuple):
    x: float
    multiple: bool
    roots: tuple[float, ...]


def contact_from_gap(alpha: float, D_target: float, x_min: float = 1e-300, n_scan: int = 4000) -> ContactRoot:
    """Contact variable ``x`` with ``D(x) = D_target`` (largest root if several)."""
    _check_alpha(alpha)
    if not D_target > 1.0:
        raise DomainError("D_target must exceed 1")
    xs = np.concatenate([np.geomspace(x_min, 0.5, n_scan), np.linspace(0.5, 1 - 1e-9, n_scan)[1:]])
    f = gap_amplitude(alpha, xs) - D_target
    sign = np.sign(f)
    idx = np.flatnonzero(sign[:-1] * sign[1:] < 0)
    exact = xs[f == 0.0]
    if idx.size == 0 and exact.size == 0:
        raise BracketError(f"no sign change of D(x) - {D_target} on [{x_min}, 1)")
    fn: Callable[[float], float] = lambda t: float(gap_amplitude(alpha, t)) - D_target
    roots = [brentq(fn, xs[i], xs[i + 1], xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)
             for i in idx]
    roots = sorted(set(roots) | set(exact.tolist()))
    return ContactRoot(float(roots[-1]), len(roots) > 1, tuple(roots))


def holder_to_amplitude_ratio(m: MinimizerClosedForm) -> float:
    """Measured Hölder seminorm of ``u*`` divided by ``D``."""
    from .radial import holder_seminorm

    return holder_seminorm(m.profile(), m.alpha) / m.D
