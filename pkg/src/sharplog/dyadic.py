"""Littlewood-Paley analysis of radial functions on R^4.

The radial Fourier transform of ``u`` in four dimensions is

    u_hat(rho) = (2 pi)^2 rho^-1 int_0^inf u(r) J_1(r rho) r^2 dr,

which is an order-one Hankel transform of ``U(r) = r u(r)``.  It is computed
with the discrete Hankel transform built on the zeros of ``J_1`` (a symmetric,
numerically orthogonal matrix), so that forward and inverse transforms are the
same matrix and Parseval holds for the sample vectors.  A panel Gauss
quadrature of the defining integral is provided as an independent check.

Frequency cutoffs come from a C-infinity smooth step ``theta``: ``chi = theta``
and ``phi(xi) = theta(xi / 2) - theta(xi)``.  Both partition identities then
telescope, so their residuals are at rounding level.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import j0, j1, jn_zeros, jv, roots_legendre

from .errors import DomainError, ResolutionError, WindowError
from .radial import (
    BALL_AREA,
    QuadratureScheme,
    RadialProfile,
    Segment,
    norms,
    weighted_l2_norm_sq,
)
from .tolerances import TOL

FOURIER_FACTOR = (2.0 * math.pi) ** 2
DEFAULT_WINDOW = (-10, 14)
# First Dirichlet eigenvalue of -Delta on the unit ball of R^4 (j_{1,1}^2).
DIRICHLET_EIGENVALUE = float(jn_zeros(1, 1)[0]) ** 2


# ------------------------------------------------------------------ transform


@dataclass(frozen=True)
class HankelGrid:
    """Discrete order-one Hankel transform on ``[0, R]`` with ``n`` samples.

    Spatial samples sit at ``r_k = j_k R / S`` and frequencies at
    ``rho_m = j_m / R`` where ``j_k`` are the zeros of ``J_1`` and
    ``S = j_{n+1}``.  The largest resolved frequency is ``S / R``.
    """

    R: float = 16.0
    n: int = 2048

    def __post_init__(self) -> None:
        if self.R <= 0 or self.n < 8:
            raise DomainError("Hankel grid needs R > 0 and at least 8 samples")

    @cached_property
    def _zeros(self) -> np.ndarray:
        return jn_zeros(1, self.n + 1)

    @property
    def S(self) -> float:
        return float(self._zeros[-1])

    @cached_property
    def j(self) -> np.ndarray:
        return self._zeros[:-1]

    @cached_property
    def J2(self) -> np.ndarray:
        return np.abs(jv(2, self.j))

    @cached_property
    def r(self) -> np.ndarray:
        return self.j * self.R / self.S

    @cached_property
    def rho(self) -> np.ndarray:
        return self.j / self.R

    @property
    def rho_max(self) -> float:
        return self.S / self.R

    @cached_property
    def K1(self) -> np.ndarray:
        """``J_1(j_m j_k / S)``, symmetric."""
        return j1(np.outer(self.j, self.j) / self.S)

    @cached_property
    def K0(self) -> np.ndarray:
        return j0(np.outer(self.j, self.j) / self.S)

    @cached_property
    def matrix(self) -> np.ndarray:
        return 2.0 * self.K1 / (np.outer(self.J2, self.J2) * self.S)

    @cached_property
    def weights_r(self) -> np.ndarray:
        """Weights for ``int_0^R f(r) r dr`` at the spatial samples."""
        return 2.0 * self.R**2 / (self.S**2 * self.J2**2)

    @cached_property
    def weights_rho(self) -> np.ndarray:
        """Weights for ``int_0^{S/R} F(rho) rho d rho`` at the frequency samples."""
        return 2.0 / (self.R**2 * self.J2**2)

    def hankel(self, U: np.ndarray) -> np.ndarray:
        """Samples of ``int U(r) J_1(rho r) r dr`` at ``rho_m`` from ``U(r_k)``."""
        a = self.R / math.sqrt(self.S)
        return (self.matrix @ (np.asarray(U) * a / self.J2)) * self.J2 * self.R / math.sqrt(self.S)

    def inverse_hankel(self, H: np.ndarray) -> np.ndarray:
        """``U(r_k)`` from samples ``H(rho_m)``; the transform is its own inverse."""
        b = math.sqrt(self.S) / self.R
        return (self.matrix @ (np.asarray(H) * b / self.J2)) * self.J2 * math.sqrt(self.S) / self.R

    def orthogonality_defect(self) -> float:
        T = self.matrix
        return float(np.abs(T @ T - np.eye(self.n)).max())


@lru_cache(maxsize=8)
def hankel_grid(R: float = 16.0, n: int = 2048) -> HankelGrid:
    return HankelGrid(float(R), int(n))


DOMAIN_FACTOR = 16.0


def default_grid(p: RadialProfile, n: int = 2048) -> HankelGrid:
    """Transform domain ``16 R`` for a profile supported in ``B_R``, so that
    the grid dilates with the profile."""
    return hankel_grid(DOMAIN_FACTOR * p.R, n)


def _series_coefficients(grid: HankelGrid, H: np.ndarray) -> np.ndarray:
    """Fourier-Bessel coefficients of ``U`` on ``[0, R]`` from ``H(rho_m)``."""
    return 2.0 * H / (grid.R**2 * grid.J2**2)


def series_values(grid: HankelGrid, H: np.ndarray, r, order: int = 0) -> np.ndarray:
    """Evaluate ``u = U / r`` (or ``u'`` when ``order == 1``) at arbitrary radii."""
    r = np.atleast_1d(np.asarray(r, float))
    c = _series_coefficients(grid, H)
    k = grid.j / grid.R
    out = np.empty_like(r)
    small = r < 1e-12
    if order == 0:
        out[small] = 0.5 * np.dot(c, k)
    elif order == 1:
        out[small] = 0.0
    else:
        raise DomainError("series derivatives above first order are not provided")
    rr = r[~small]
    if rr.size:
        z = np.outer(rr, k)
        J1 = j1(z) @ c
        if order == 0:
            out[~small] = J1 / rr
        else:
            out[~small] = (j0(z) @ (c * k)) / rr - 2.0 * J1 / rr**2
    return out


@dataclass(frozen=True)
class FrequencyProfile:
    """Samples of ``u_hat`` at the transform frequencies ``rho_m``."""

    grid: HankelGrid
    rho: np.ndarray
    values: np.ndarray
    source: str = "dht"

    @property
    def hankel_values(self) -> np.ndarray:
        """``H(rho) = int u(r) J_1(r rho) r^2 dr``."""
        return self.rho * self.values / FOURIER_FACTOR

    def energy(self, weight: np.ndarray | None = None) -> float:
        """``(2 pi)^-4 ||u_hat||^2`` (the squared L^2 norm of ``u``) restricted by ``weight``."""
        H = self.hankel_values
        if weight is not None:
            H = H * weight
        return BALL_AREA * float(np.dot(self.grid.weights_rho, H * H))

    def laplacian_energy(self) -> float:
        H = self.hankel_values
        return BALL_AREA * float(np.dot(self.grid.weights_rho, (self.rho**2 * H) ** 2))

    def top_octave_fraction(self) -> float:
        total = self.energy()
        if total == 0.0:
            return 0.0
        return self.energy((self.rho > 0.5 * self.grid.rho_max).astype(float)) / total

    def to_rows(self) -> list[dict]:
        return [{"rho": float(a), "u_hat": float(b)} for a, b in zip(self.rho, self.values)]


def _samples_on_grid(p: RadialProfile, grid: HankelGrid) -> np.ndarray:
    if p.R > grid.R:
        raise DomainError(f"profile radius {p.R} exceeds the transform domain {grid.R}")
    return np.asarray(p(grid.r, extend=True), float)


def _profile_from_hankel(grid: HankelGrid, H: np.ndarray) -> RadialProfile:
    """Sampled cubic-Hermite profile on ``[0, R]`` of the inverse transform."""
    c = _series_coefficients(grid, H)
    k = grid.j / grid.R
    U = grid.inverse_hankel(H)
    vals = U / grid.r
    slopes = (grid.K0 @ (c * k)) / grid.r - 2.0 * U / grid.r**2
    v0 = 0.5 * float(np.dot(c, k))
    slope_R = float(np.dot(c * k, j0(grid.j))) / grid.R
    nodes = np.concatenate([[0.0], grid.r, [grid.R]])
    values = np.concatenate([[v0], vals, [0.0]])
    dv = np.concatenate([[0.0], slopes, [slope_R]])
    seg = Segment(0.0, grid.R, "sampled",
                  {"nodes": nodes.tolist(), "values": values.tolist(), "slopes": dv.tolist()})
    return RadialProfile(grid.R, (seg,), continuous=True)


def radial_fourier(obj, direction: str = "forward", grid: HankelGrid | None = None,
                   check_resolution: bool = True):
    """Radial Fourier transform in R^4 (forward) or its inverse.

    ``forward`` takes a :class:`RadialProfile` and returns a
    :class:`FrequencyProfile`; ``inverse`` takes a :class:`FrequencyProfile`
    and returns a sampled :class:`RadialProfile` on the transform domain.
    """
    if direction == "forward":
        grid = grid or default_grid(obj)
        U = grid.r * _samples_on_grid(obj, grid)
        H = grid.hankel(U)
        out = FrequencyProfile(grid, grid.rho, FOURIER_FACTOR * H / grid.rho, "dht")
        if check_resolution:
            frac = out.top_octave_fraction()
            if frac > TOL.tail_energy:
                raise ResolutionError(
                    f"{frac:.3e} of the energy lies in the top octave below rho_max = "
                    f"{grid.rho_max:.4g}; refine the transform grid")
        return out
    if direction == "inverse":
        if not isinstance(obj, FrequencyProfile):
            raise DomainError("inverse transform expects a FrequencyProfile")
        return _profile_from_hankel(obj.grid, obj.hankel_values)
    raise DomainError(f"unknown direction {direction!r}")


def fourier_quadrature(p: RadialProfile, rho, order: int = 16, levels: int = 40) -> np.ndarray:
    """``u_hat(rho)`` by panel Gauss quadrature of the defining integral.

    Panels are at most half a period of ``J_1(r rho)`` long for the largest
    ``rho`` and are graded geometrically towards the origin.
    """
    rho = np.atleast_1d(np.asarray(rho, float))
    if (rho <= 0).any():
        raise DomainError("quadrature transform needs positive frequencies")
    x, w = roots_legendre(order)
    h = min(math.pi / float(rho.max()), p.R / 8.0)
    geo = p.R * 0.5 ** np.arange(levels, 0, -1, dtype=float)
    cuts = np.unique(np.concatenate([[0.0], geo[geo < h], np.arange(h, p.R, h), [p.R], p.breakpoints]))
    lo, hi = cuts[:-1], cuts[1:]
    r = (0.5 * (hi - lo)[:, None] * x + 0.5 * (hi + lo)[:, None]).ravel()
    wr = (0.5 * (hi - lo)[:, None] * w).ravel()
    f = np.asarray(p(r), float) * r**2 * wr
    out = np.empty_like(rho)
    for start in range(0, rho.size, 256):
        sl = slice(start, start + 256)
        out[sl] = j1(np.outer(rho[sl], r)) @ f
    return FOURIER_FACTOR * out / rho


# ------------------------------------------------------------------ cutoffs


def smooth_step(t) -> np.ndarray:
    """C-infinity step: 0 for ``t <= 0``, 1 for ``t >= 1``."""
    t = np.clip(np.asarray(t, float), 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        a = np.where(t > 0, np.exp(-1.0 / np.where(t > 0, t, 1.0)), 0.0)
        b = np.where(t < 1, np.exp(-1.0 / np.where(t < 1, 1.0 - t, 1.0)), 0.0)
    return a / (a + b)


@dataclass(frozen=True)
class CutoffPair:
    """Smooth frequency cutoffs ``chi`` and ``phi``.

    ``theta`` equals 1 on ``[0, inner]`` and 0 on ``[outer, inf)``; then
    ``chi = theta`` is supported in ``|xi| < outer`` and
    ``phi(xi) = theta(xi / 2) - theta(xi)`` in ``inner < |xi| < 2 outer``.
    """

    inner: float = 0.78
    outer: float = 1.3
    log_grid: np.ndarray = field(default_factory=lambda: np.logspace(-4, 4, 8001), repr=False)

    def theta(self, xi) -> np.ndarray:
        xi = np.abs(np.asarray(xi, float))
        return 1.0 - smooth_step((xi - self.inner) / (self.outer - self.inner))

    def chi(self, xi) -> np.ndarray:
        return self.theta(xi)

    def phi(self, xi) -> np.ndarray:
        xi = np.asarray(xi, float)
        return self.theta(0.5 * xi) - self.theta(xi)

    def inhomogeneous_sum(self, xi, j_max: int) -> np.ndarray:
        xi = np.asarray(xi, float)
        total = self.chi(xi)
        for j in range(j_max + 1):
            total = total + self.phi(xi * 2.0**-j)
        return total

    def homogeneous_sum(self, xi, j_min: int, j_max: int) -> np.ndarray:
        xi = np.asarray(xi, float)
        total = np.zeros_like(xi)
        for j in range(j_min, j_max + 1):
            total = total + self.phi(xi * 2.0**-j)
        return total

    def partition_residual(self, j_max: int = 14) -> float:
        """Max of ``|chi + sum_{0 <= j <= j_max} phi(2^-j .) - 1|`` for ``xi <= 2^j_max``."""
        xi = self.log_grid[self.log_grid <= 2.0**j_max]
        return float(np.abs(self.inhomogeneous_sum(xi, j_max) - 1.0).max())

    def homogeneous_residual(self, j_min: int = -10, j_max: int = 14) -> float:
        """Same for the homogeneous sum, on ``xi`` well inside the window."""
        lo, hi = self.outer * 2.0**j_min, self.inner * 2.0 ** (j_max + 1)
        xi = self.log_grid[(self.log_grid >= lo) & (self.log_grid <= hi)]
        return float(np.abs(self.homogeneous_sum(xi, j_min, j_max) - 1.0).max())

    def support_violation(self) -> float:
        """Largest cutoff value sampled outside the required supports."""
        xi = self.log_grid
        bad_chi = np.abs(self.chi(xi[xi >= 4.0 / 3.0]))
        mask = (xi <= 0.75) | (xi >= 8.0 / 3.0)
        bad_phi = np.abs(self.phi(xi[mask]))
        return float(max(bad_chi.max(initial=0.0), bad_phi.max(initial=0.0)))

    def to_json(self) -> dict:
        return {"inner": self.inner, "outer": self.outer,
                "theta": "1 - S((xi - inner) / (outer - inner)), S(t) = e^(-1/t) / (e^(-1/t) + e^(-1/(1-t)))",
                "chi": "theta(xi)", "phi": "theta(xi / 2) - theta(xi)"}


def build_cutoffs(inner: float = 0.78, outer: float = 1.3, n_log: int = 8001) -> CutoffPair:
    """Concrete Littlewood-Paley pair with ``supp chi`` in ``B_{4/3}`` and
    ``supp phi`` in the annulus ``3/4 < |xi| < 8/3``."""
    if not (0.75 < inner < outer < 4.0 / 3.0):
        raise DomainError("need 3/4 < inner < outer < 4/3 for the required supports")
    return CutoffPair(inner, outer, np.logspace(-4, 4, n_log))


# ------------------------------------------------------------- decomposition


@dataclass
class DyadicDecomposition:
    """Littlewood-Paley blocks of ``u`` on a Hankel grid.

    Inhomogeneous blocks are indexed by ``j >= -1`` (``-1`` carries ``chi``);
    homogeneous blocks by ``j`` in ``[j_min, j_max]``.  Blocks are held as
    spectra and turned into sampled profiles on demand.
    """

    u: RadialProfile
    spectrum: FrequencyProfile
    cutoffs: CutoffPair
    window: tuple[int, int]
    m: int | None = None
    N_alpha: float | None = None
    _sup_cache: dict = field(default_factory=dict, repr=False)

    @property
    def grid(self) -> HankelGrid:
        return self.spectrum.grid

    @property
    def j_max(self) -> int:
        return self.window[1]

    @property
    def j_min(self) -> int:
        return self.window[0]

    def multiplier(self, j: int, homogeneous: bool = False) -> np.ndarray:
        rho = self.spectrum.rho
        if not homogeneous:
            if j < -1:
                return np.zeros_like(rho)
            if j == -1:
                return self.cutoffs.chi(rho)
        return self.cutoffs.phi(rho * 2.0**-j)

    def inhomogeneous_indices(self) -> list[int]:
        return list(range(-1, self.j_max + 1))

    def homogeneous_indices(self) -> list[int]:
        return list(range(self.j_min, self.j_max + 1))

    def block_hankel(self, j: int, homogeneous: bool = False) -> np.ndarray:
        return self.multiplier(j, homogeneous) * self.spectrum.hankel_values

    def block(self, j: int, homogeneous: bool = False) -> RadialProfile:
        return _profile_from_hankel(self.grid, self.block_hankel(j, homogeneous))

    def blocks(self, homogeneous: bool = False) -> dict[int, RadialProfile]:
        idx = self.homogeneous_indices() if homogeneous else self.inhomogeneous_indices()
        return {j: self.block(j, homogeneous) for j in idx}

    @property
    def j_resolved(self) -> int:
        """Largest ``j`` whose annulus lies entirely below the grid's top frequency."""
        return math.floor(math.log2(self.grid.rho_max / (2.0 * self.cutoffs.outer)))

    def low_pass_hankel(self, J: int) -> np.ndarray:
        """Spectrum of ``S_J u = D_-1 u + ... + D_{J-1} u`` (multiplier ``theta(2^-J rho)``)."""
        return self.cutoffs.theta(self.spectrum.rho * 2.0**-J) * self.spectrum.hankel_values

    def remainder_sup(self, J: int, n_log: int = 400) -> float:
        """``||u - S_J u||_inf`` on the transform samples, the origin, the
        breakpoints of ``u`` and a logarithmic grid towards the origin."""
        g = self.grid
        R = self.u.R
        r = np.unique(np.concatenate([[0.0], g.r[g.r <= R], self.u.breakpoints,
                                      np.logspace(math.log10(R) - 8, math.log10(R), n_log)]))
        diff = self.u(r) - series_values(g, self.low_pass_hankel(J), r)
        outside = g.inverse_hankel(self.low_pass_hankel(J))[g.r > R] / g.r[g.r > R]
        return float(max(np.abs(diff).max(), np.abs(outside).max(initial=0.0)))

    def block_samples(self, j: int, homogeneous: bool = False) -> np.ndarray:
        return self.grid.inverse_hankel(self.block_hankel(j, homogeneous)) / self.grid.r

    def block_l2(self, j: int, homogeneous: bool = False) -> float:
        return math.sqrt(self.spectrum.energy(self.multiplier(j, homogeneous)))

    def block_sup(self, j: int, homogeneous: bool = False) -> float:
        key = (j, homogeneous)
        if key not in self._sup_cache:
            H = self.block_hankel(j, homogeneous)
            if not H.any():
                self._sup_cache[key] = 0.0
            else:
                self._sup_cache[key] = _series_sup(self.grid, H, self.grid.inverse_hankel(H) / self.grid.r)
        return self._sup_cache[key]

    def energy_outside(self, homogeneous: bool = False) -> float:
        """Relative energy of ``u`` not carried by the window."""
        rho = self.spectrum.rho
        keep = self.cutoffs.theta(rho * 2.0 ** -(self.j_max + 1))
        if homogeneous:
            keep = keep - self.cutoffs.theta(rho * 2.0**-self.j_min)
        total = self.spectrum.energy()
        return self.spectrum.energy(1.0 - keep) / total if total > 0 else 0.0

    def low_tail_bound(self) -> float:
        """Relative bound on the energy of ``u_hat`` below the homogeneous window.

        Uses ``|J_1(z)| <= z / 2``, so ``|H(rho)| <= rho M / 2`` with
        ``M = int |u| r^3 dr``.
        """
        q = QuadratureScheme(R=self.u.R)
        M = q.integrate(lambda r: np.abs(self.u(r)) * r**3, 0.0, self.u.R, breaks=self.u.breakpoints)
        a = self.cutoffs.outer * 2.0**self.j_min
        total = self.spectrum.energy()
        return BALL_AREA * M * M * a**4 / 16.0 / total if total > 0 else 0.0

    def reconstruction_error(self, homogeneous: bool = False) -> float:
        """Sup over transform samples in the support of ``|sum_j blocks - u|``."""
        idx = self.homogeneous_indices() if homogeneous else self.inhomogeneous_indices()
        H = sum(self.block_hankel(j, homogeneous) for j in idx)
        g = self.grid
        mask = g.r <= self.u.R
        rec = g.inverse_hankel(H)[mask] / g.r[mask]
        return float(np.abs(rec - self.u(g.r[mask])).max())

    def partition_residual(self) -> float:
        rho = self.spectrum.rho
        return float(np.abs(self.cutoffs.inhomogeneous_sum(rho, self.j_max) - 1.0).max())

    def rows(self) -> list[dict]:
        """Per-block table: ``j``, L^2 norm, sup norm and Bernstein ratio."""
        out = []
        for j in self.inhomogeneous_indices():
            l2 = self.block_l2(j)
            sup = self.block_sup(j) if l2 > 0 else 0.0
            ratio = sup / (4.0**j * l2) if l2 > 0 else float("nan")
            out.append({"j": j, "l2": l2, "sup": sup, "bernstein_ratio": ratio,
                        "resolved": j <= self.j_resolved})
        return out


def _series_sup(grid: HankelGrid, H: np.ndarray, samples: np.ndarray, n_refine: int = 3) -> float:
    """Sup of a band-limited profile: sample maximum refined by local search."""
    r = np.concatenate([[0.0], grid.r])
    vals = np.concatenate([series_values(grid, H, [0.0]), samples])
    best = float(np.abs(vals).max())
    order = np.argsort(-np.abs(vals))[:n_refine]
    for i in order:
        lo = r[max(i - 1, 0)]
        hi = r[min(i + 1, r.size - 1)]
        if hi <= lo:
            continue
        res = minimize_scalar(lambda t: -abs(float(series_values(grid, H, [t])[0])),
                              bounds=(lo, hi), method="bounded", options={"xatol": 1e-10 * grid.R})
        best = max(best, -float(res.fun))
    return best


def decompose(u: RadialProfile, window: tuple[int, int] = DEFAULT_WINDOW, alpha: float | None = None,
              grid: HankelGrid | None = None, cutoffs: CutoffPair | None = None,
              rule: str = "quadratic", holder: float | None = None, lap: float | None = None) -> DyadicDecomposition:
    """Littlewood-Paley blocks of ``u`` (extended by zero beyond its radius).

    Raises :class:`WindowError` when more than the tail threshold of the
    energy falls outside ``window``.  With ``alpha`` the cut index ``m`` is
    computed from ``N_alpha = |u|_{C^alpha} / ||Delta u||``.
    """
    j_min, j_max = window
    if j_min > -1 or j_max < 0:
        raise DomainError("window must contain j = -1 and j = 0")
    grid = grid or default_grid(u)
    cutoffs = cutoffs or build_cutoffs()
    spec = radial_fourier(u, "forward", grid)
    d = DyadicDecomposition(u, spec, cutoffs, (int(j_min), int(j_max)))
    for homogeneous in (False, True):
        out = d.energy_outside(homogeneous)
        if out > TOL.tail_energy:
            raise WindowError(f"window {window} leaves {out:.3e} of the energy outside "
                              f"({'homogeneous' if homogeneous else 'inhomogeneous'} blocks)")
    if alpha is not None:
        if holder is None or lap is None:
            rep = norms(u, alpha)
            holder, lap = rep.holder_seminorm, rep.lap_l2
        d.N_alpha = holder / lap
        d.m = cut_index(d.N_alpha, alpha, rule)
    return d


# ------------------------------------------------------------ functionals


def cut_index(N: float, alpha: float, rule: str = "quadratic") -> int:
    """Frequency cut ``m``.

    ``quadratic``: ``max(1, 1 + floor(2 log2(N^2)))``.
    ``balanced``: ``max(1, 1 + ceil(log2(e + N) / alpha))``, which keeps the
    Hoelder tail ``2^(-m alpha) N`` bounded for every ``alpha``.
    """
    if N <= 0:
        raise DomainError("N_alpha must be positive")
    if rule == "quadratic":
        return max(1, 1 + math.floor(2.0 * math.log2(N * N)))
    if rule == "balanced":
        return max(1, 1 + math.ceil(math.log2(math.e + N) / alpha))
    raise DomainError(f"unknown cut rule {rule!r}")


def geometric_tail(m: int, alpha: float) -> float:
    """``sum_{j >= m} 2^(-j alpha) = 2^(-m alpha) / (1 - 2^(-alpha))``."""
    return 2.0 ** (-m * alpha) / (1.0 - 2.0**-alpha)


@dataclass(frozen=True)
class BesovFunctionals:
    lap_equiv: float
    holder_equiv: float
    bernstein_ratios: dict
    lap_spectral: float
    holder_argmax: int


def besov_functionals(d: DyadicDecomposition, alpha: float, floor: float = 1e-14) -> BesovFunctionals:
    """``sum_j 2^(4j) ||D_j u||^2``, ``sup_j 2^(j alpha) ||D_j u||_inf`` (homogeneous
    blocks) and the Bernstein ratios ``||D_j u||_inf / (2^(2j) ||D_j u||)`` of the
    inhomogeneous blocks carrying more than ``floor`` of the energy."""
    total = d.spectrum.energy()
    lap = 0.0
    best, arg = 0.0, d.j_min
    for j in d.homogeneous_indices():
        e = d.spectrum.energy(d.multiplier(j, True))
        lap += 16.0**j * e
        if e > floor * total and j <= d.j_resolved:
            v = 2.0 ** (j * alpha) * d.block_sup(j, True)
            if v > best:
                best, arg = v, j
    ratios = {}
    for j in d.inhomogeneous_indices():
        l2 = d.block_l2(j)
        if l2 * l2 > floor * total and j <= d.j_resolved:
            ratios[j] = d.block_sup(j) / (4.0**j * l2)
    return BesovFunctionals(lap, best, ratios, d.spectrum.laplacian_energy(), arg)


# ------------------------------------------------------- logarithmic estimate


@dataclass(frozen=True)
class LLConstants:
    """Constants fitted on a calibration corpus and then frozen."""

    c_split: float
    c_prop: float
    k_lap: float
    k_holder: float
    safety: float
    corpus_id: str
    rule: str = "quadratic"

    def to_json(self) -> dict:
        return dict(self.__dict__)


@dataclass
class LLReport:
    """Measured pieces of the logarithmic sup-norm estimate for one profile."""

    alpha: float
    sup: float
    l2: float
    lap: float
    holder: float
    N_alpha: float
    m: int
    rule: str
    low: float
    mid: float
    high: float
    tail_factor: float
    low_ratio: float
    mid_ratio: float
    high_ratio: float
    lap_ratio: float
    holder_ratio: float
    prop_ratio: float
    supported_in_unit_ball: bool
    constants: LLConstants | None = None

    @property
    def split_rhs(self) -> float:
        c = self.constants.c_split
        return c * (self.l2 + math.sqrt(self.m) * self.lap + self.tail_factor * self.holder)

    @property
    def squared_rhs(self) -> float:
        c = self.constants.c_split
        return 3.0 * c * c * (self.l2**2 + self.m * self.lap**2 + (self.tail_factor * self.holder) ** 2)

    @property
    def prop_rhs(self) -> float:
        return self.constants.c_prop * (self.l2**2 + self.lap**2 * math.log(math.e + self.N_alpha))

    @property
    def poincare_constant(self) -> float:
        """``C (1 + 1 / lambda_1^2)`` from ``||u|| <= ||Delta u|| / lambda_1`` on the unit ball."""
        return self.constants.c_prop * (1.0 + 1.0 / DIRICHLET_EIGENVALUE**2)

    @property
    def poincare_rhs(self) -> float:
        return self.poincare_constant * self.lap**2 * math.log(math.e + self.N_alpha)

    def checks(self) -> dict[str, bool]:
        if self.constants is None:
            raise DomainError("report has no frozen constants attached")
        k = self.constants
        out = {
            "triangle": self.sup <= (self.low + self.mid + self.high) * (1 + 1e-9),
            "split": self.sup <= self.split_rhs,
            "squared": self.sup**2 <= self.squared_rhs,
            "proposition": self.sup**2 <= self.prop_rhs,
            "lap_equiv": 1.0 / k.k_lap <= self.lap_ratio <= k.k_lap,
            "holder_equiv": 1.0 / k.k_holder <= self.holder_ratio <= k.k_holder,
        }
        if self.supported_in_unit_ball:
            out["poincare"] = self.sup**2 <= self.poincare_rhs
        return out

    def passed(self) -> bool:
        return all(self.checks().values())

    @property
    def prop_margin(self) -> float:
        """``1 - lhs / rhs`` for the final inequality."""
        return 1.0 - self.sup**2 / self.prop_rhs

    def to_json(self) -> dict:
        d = {k: v for k, v in self.__dict__.items() if k != "constants"}
        if self.constants is not None:
            d["constants"] = self.constants.to_json()
            d["checks"] = self.checks()
            d["prop_margin"] = self.prop_margin
        return d


def verify_ll_estimate(u: RadialProfile, alpha: float, constants: LLConstants | None = None,
                       rule: str | None = None, grid: HankelGrid | None = None,
                       window: tuple[int, int] = DEFAULT_WINDOW) -> LLReport:
    """Measure every step of the logarithmic estimate for ``u``.

    The pieces are ``low = ||D_-1 u||_inf``, ``mid = sum_{0 <= j < m} ||D_j u||_inf``
    and ``high = sum_{j >= m} ||D_j u||_inf``, where blocks beyond the grid's
    resolution are replaced by the measured remainder ``||u - S_J u||_inf``,
    which keeps the triangle inequality intact.  Each piece is divided by the
    quantity
    that bounds it (``||u||``, ``sqrt(m) ||Delta u||`` and
    ``2^(-m alpha) / (1 - 2^(-alpha)) |u|_{C^alpha}``).  With ``constants`` the
    split, squared and final inequalities are evaluated.
    """
    if not 0.0 < alpha < 1.0:
        raise DomainError("alpha must lie in (0, 1)")
    rule = rule or (constants.rule if constants else "quadratic")
    rep = norms(u, alpha)
    d = decompose(u, window, alpha=alpha, grid=grid, rule=rule, holder=rep.holder_seminorm, lap=rep.lap_l2)
    m, N = d.m, d.N_alpha
    J = d.j_resolved + 1
    sups = {j: d.block_sup(j) for j in range(-1, J)}
    rem = d.remainder_sup(J)
    low = sups[-1]
    if m < J:
        mid = sum(v for j, v in sups.items() if 0 <= j < m)
        high = sum(v for j, v in sups.items() if m <= j) + rem
    else:
        mid = sum(v for j, v in sups.items() if j >= 0) + rem
        high = 0.0
    tail = geometric_tail(m, alpha)
    bf = besov_functionals(d, alpha)
    lap_sq = rep.lap_l2**2
    return LLReport(
        alpha=alpha, sup=rep.sup_norm, l2=rep.l2_ball, lap=rep.lap_l2, holder=rep.holder_seminorm,
        N_alpha=N, m=m, rule=rule, low=low, mid=mid, high=high, tail_factor=tail,
        low_ratio=low / rep.l2_ball,
        mid_ratio=mid / (math.sqrt(m) * rep.lap_l2),
        high_ratio=high / (tail * rep.holder_seminorm),
        lap_ratio=bf.lap_equiv / lap_sq,
        holder_ratio=bf.holder_equiv / rep.holder_seminorm,
        prop_ratio=rep.sup_norm**2 / (rep.l2_ball**2 + lap_sq * math.log(math.e + N)),
        supported_in_unit_ball=u.R <= 1.0,
        constants=constants,
    )


# ------------------------------------------------------------------ corpora


@dataclass(frozen=True)
class CorpusItem:
    id: str
    profile: RadialProfile
    alpha: float


def _minimizer_item(alpha: float, x: float, R: float = 1.0) -> CorpusItem:
    from .minimizer import coefficients_from_contact, minimizer_profile

    p = minimizer_profile(coefficients_from_contact(alpha, x))
    if R == 1.0:
        return CorpusItem(f"minimizer(alpha={alpha},x={x})", p, alpha)
    return CorpusItem(f"minimizer(alpha={alpha},x={x},R={R:g})", p.dilate(R), alpha)


def _extremal_item(eps: float, alpha: float) -> CorpusItem:
    from .extremal import build_loglog_extremal

    return CorpusItem(f"loglog(eps={eps:g},alpha={alpha})", build_loglog_extremal(eps).u_profile, alpha)


CALIBRATION_SPEC = {
    # The small-contact points sit below the validation range: constants grow as x -> 0,
    # so calibration has to reach further into that regime than validation does.
    "minimizer": [(a, x) for a in (0.3, 0.5, 0.7) for x in (0.04, 0.25, 0.64)] + [(0.5, 5e-3), (0.7, 5e-3)],
    "loglog": [(1e-2, 0.5)],
    "dilated": [(0.5, 0.25, 1e-2), (0.3, 0.64, 0.05), (0.7, 0.04, 4.0)],
}
VALIDATION_SPEC = {
    "minimizer": [(a, x) for a in (0.4, 0.6) for x in (0.01, 0.16, 0.49, 0.81)]
    + [(a, 0.09) for a in (0.3, 0.5, 0.7)],
    "loglog": [(1e-3, 0.5), (1e-4, 0.5), (1e-3, 0.3)],
    "dilated": [(0.4, 0.16, 0.015), (0.6, 0.49, 1e-2), (0.5, 0.09, 0.03), (0.5, 0.81, 10.0)],
}


def corpus(name: str) -> list[CorpusItem]:
    """The declared calibration or validation corpus (disjoint by construction)."""
    spec = {"calibration": CALIBRATION_SPEC, "validation": VALIDATION_SPEC}.get(name)
    if spec is None:
        raise DomainError(f"unknown corpus {name!r}")
    items = [_minimizer_item(a, x) for a, x in spec["minimizer"]]
    items += [_extremal_item(e, a) for e, a in spec["loglog"]]
    items += [_minimizer_item(a, x, R) for a, x, R in spec["dilated"]]
    return items


CALIBRATION_SAFETY = 1.25


def calibrate_ll(reports: Iterable[LLReport], corpus_id: str = "calibration",
                 safety: float = CALIBRATION_SAFETY, rule: str = "quadratic") -> LLConstants:
    """Fit the constants as ``safety`` times the worst ratio seen on ``reports``."""
    reports = list(reports)
    if not reports:
        raise DomainError("calibration needs at least one report")
    c_split = max(max(r.low_ratio, r.mid_ratio, r.high_ratio) for r in reports)
    c_prop = max(r.prop_ratio for r in reports)
    k_lap = max(max(r.lap_ratio, 1.0 / r.lap_ratio) for r in reports)
    k_hol = max(max(r.holder_ratio, 1.0 / r.holder_ratio) for r in reports)
    return LLConstants(safety * c_split, safety * c_prop, safety * k_lap, safety * k_hol,
                       safety, corpus_id, rule)


def attach(reports: Sequence[LLReport], constants: LLConstants) -> list[LLReport]:
    for r in reports:
        r.constants = constants
    return list(reports)


__all__ = [
    "FOURIER_FACTOR", "DEFAULT_WINDOW", "DIRICHLET_EIGENVALUE", "HankelGrid", "hankel_grid",
    "series_values", "default_grid", "DOMAIN_FACTOR", "FrequencyProfile", "radial_fourier", "fourier_quadrature", "smooth_step",
    "CutoffPair", "build_cutoffs", "DyadicDecomposition", "decompose", "cut_index",
    "geometric_tail", "BesovFunctionals", "besov_functionals", "LLConstants", "LLReport",
    "verify_ll_estimate", "CorpusItem", "corpus", "calibrate_ll", "attach", "CALIBRATION_SAFETY",
]
