"""Discrete biharmonic obstacle problem on the unit ball of R^4 (radial).

The energy ``||Δu||^2 = 2 pi^2 ∫ (u'' + 3u'/r)^2 r^3 dr`` is discretised with
C^1 cubic Hermite elements (value and slope unknowns at every node).  The
value and slope at ``r = 1`` are clamped; nothing is imposed at ``r = 0``.

Two solvers are provided:

* :func:`qp_oracle` minimises the discrete energy under nodal constraints
  ``u_i >= psi(r_i)`` with a primal-dual active-set method, falling back to a
  dual non-negative least-squares formulation if the active set cycles;
* :func:`solve_penalized` solves the semilinear problem
  ``Δ^2 u = Δ^2 psi * theta_eps(u - psi)`` by semismooth Newton with
  backtracking, along a decreasing ``eps`` schedule with warm starts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu
from scipy.special import roots_jacobi, roots_legendre

from .errors import AssemblyError, DomainError, NonConvergence, SolverError
from .minimizer import coefficients_from_contact, energy_density, gap_amplitude, minimizer_profile
from .radial import RadialProfile, Segment, laplacian_radial, single
from .tolerances import TOL

TWO_PI2 = 2.0 * math.pi**2


# ------------------------------------------------------------------- grids


@dataclass(frozen=True)
class RadialGrid:
    """Nodes ``0 = r_0 < ... < r_N = 1`` with a value and a slope unknown per node."""

    nodes: np.ndarray
    grading: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        r = np.asarray(self.nodes, float)
        object.__setattr__(self, "nodes", r)
        if r.ndim != 1 or r.size < 3:
            raise DomainError("a grid needs at least two elements")
        if r[0] != 0.0 or r[-1] != 1.0:
            raise DomainError("grid must start at 0 and end at 1")
        if not np.all(np.diff(r) > 0):
            raise DomainError("grid nodes must be strictly increasing")

    @property
    def n_elements(self) -> int:
        return self.nodes.size - 1

    @property
    def n_free(self) -> int:
        """Unknowns after clamping value and slope at ``r = 1``."""
        return 2 * self.n_elements

    def cell_of(self, r: float) -> int:
        return int(np.clip(np.searchsorted(self.nodes, r) - 1, 0, self.n_elements - 1))


def make_grid(n: int, grading: float = 4.0, kind: str = "power") -> RadialGrid:
    """Graded grid ``r_i = (i/n)^grading``; ``kind='uniform'`` ignores the exponent."""
    if n < 2:
        raise DomainError("--grid-n must be at least 2")
    t = np.linspace(0.0, 1.0, n + 1)
    if kind == "uniform":
        return RadialGrid(t, {"kind": "uniform"})
    if kind != "power":
        raise DomainError(f"unknown grading kind {kind!r}")
    if grading < 1.0:
        raise DomainError("grading exponent must be >= 1")
    r = t**grading
    r[-1] = 1.0
    return RadialGrid(r, {"kind": "power", "exponent": grading})


# --------------------------------------------------------------- basis


def _hermite(t: np.ndarray, h: np.ndarray):
    """Values, first and second r-derivatives of the four Hermite shape functions.

    ``t`` has shape (E, Q), ``h`` shape (E, 1); returns arrays of shape (E, Q, 4).
    """
    t2, t3 = t * t, t * t * t
    H = np.stack([1 - 3 * t2 + 2 * t3, h * (t - 2 * t2 + t3), 3 * t2 - 2 * t3, h * (t3 - t2)], -1)
    dH = np.stack([(-6 * t + 6 * t2) / h, 1 - 4 * t + 3 * t2, (6 * t - 6 * t2) / h, 3 * t2 - 2 * t], -1)
    d2H = np.stack([(-6 + 12 * t) / h**2, (-4 + 6 * t) / h, (6 - 12 * t) / h**2, (6 * t - 2) / h], -1)
    return H, dH, d2H


def _element_dofs(n_el: int) -> np.ndarray:
    e = np.arange(n_el)[:, None]
    return np.hstack([2 * e, 2 * e + 1, 2 * e + 2, 2 * e + 3])


def _gauss(n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = roots_legendre(n)
    return 0.5 * (x + 1), 0.5 * w


# ------------------------------------------------------------ assembly


@dataclass(frozen=True)
class DiscreteEnergy:
    """``u -> u^T A u`` equals ``||Δu||^2`` for the element function with unknowns ``u``."""

    grid: RadialGrid
    A: sp.csc_matrix  # free unknowns only
    A_full: sp.csr_matrix  # including the two clamped unknowns at r = 1

    def energy(self, u: np.ndarray) -> float:
        u = np.asarray(u, float)
        M = self.A if u.size == self.A.shape[0] else self.A_full
        return float(u @ (M @ u))

    def symmetry_defect(self) -> float:
        d = abs(self.A - self.A.T).max()
        return float(d / max(abs(self.A).max(), 1e-300))

    def banded(self) -> np.ndarray:
        """Upper banded storage (bandwidth 3) as used by ``scipy.linalg.solveh_banded``."""
        n = self.A.shape[0]
        ab = np.zeros((4, n))
        A = self.A.tocsr()
        for k in range(4):
            d = A.diagonal(k)
            ab[3 - k, k:] = d
        return ab


def assemble(grid: RadialGrid) -> DiscreteEnergy:
    """Global energy matrix; three Gauss points integrate every element exactly."""
    r = grid.nodes
    h = np.diff(r)
    if np.any(h <= 0) or not np.all(np.isfinite(h)):
        raise AssemblyError("degenerate element")
    tq, wq = _gauss(3)
    t = np.broadcast_to(tq, (h.size, tq.size))
    hh = h[:, None]
    rq = r[:-1, None] + hh * t
    _, d1, d2 = _hermite(t, hh)
    w = (wq * hh)[..., None, None] * TWO_PI2  # (E, Q, 1, 1)
    r3 = rq[..., None, None] ** 3
    r2 = rq[..., None, None] ** 2
    r1 = rq[..., None, None]
    outer = lambda a, b: a[..., :, None] * b[..., None, :]
    Ke = (w * (r3 * outer(d2, d2) + 3 * r2 * (outer(d1, d2) + outer(d2, d1)) + 9 * r1 * outer(d1, d1))).sum(1)
    if not np.all(np.isfinite(Ke)):
        raise AssemblyError("non-finite element matrix")
    dofs = _element_dofs(h.size)
    rows = np.repeat(dofs, 4, axis=1).ravel()
    cols = np.tile(dofs, (1, 4)).ravel()
    n_all = 2 * r.size
    A_full = sp.coo_matrix((Ke.ravel(), (rows, cols)), shape=(n_all, n_all)).tocsr()
    A_full = 0.5 * (A_full + A_full.T)
    nf = grid.n_free
    return DiscreteEnergy(grid, A_full[:nf, :nf].tocsc(), A_full)


def interpolate(grid: RadialGrid, p: RadialProfile) -> np.ndarray:
    """Hermite interpolation unknowns (value, slope) of a profile, clamped end removed."""
    r = grid.nodes[:-1]
    u = np.empty(2 * r.size)
    u[0::2] = p(r)
    slope = p.deriv(r, 1)
    if not np.isfinite(slope[0]):
        slope[0] = 0.0
    u[1::2] = slope
    return u


def element_profile(grid: RadialGrid, u: np.ndarray) -> RadialProfile:
    """Sampled profile of the element function (exact cubic Hermite spline)."""
    vals = np.append(u[0::2], 0.0)
    slopes = np.append(u[1::2], 0.0)
    seg = Segment(0.0, 1.0, "sampled", {"nodes": grid.nodes.tolist(), "values": vals.tolist(),
                                        "slopes": slopes.tolist()})
    return RadialProfile(1.0, (seg,), h2_admissible=True)


# ---------------------------------------------------------- obstacle data


def theta(t, eps: float):
    """Penalisation switch: 1 for ``t <= 0``, ``1 - t/eps`` on ``[0, eps]``, 0 beyond."""
    if not eps > 0:
        raise DomainError("eps must be positive")
    out = np.clip(1.0 - np.asarray(t, float) / eps, 0.0, 1.0)
    return float(out) if out.ndim == 0 else out


def theta_slope(t, eps: float) -> np.ndarray:
    t = np.asarray(t, float)
    return np.where((t > 0) & (t < eps), -1.0 / eps, 0.0)


def obstacle_profile(alpha: float, D: float) -> RadialProfile:
    return single("power", 1.0, c=1.0, k=-D, p=alpha)


def bilaplacian_obstacle(alpha: float, D: float) -> tuple[float, float]:
    """``(coefficient, exponent)`` of ``Δ^2 psi`` computed by applying the radial Laplacian twice."""
    lap2 = laplacian_radial(laplacian_radial(obstacle_profile(alpha, D)))
    terms = [t for t in lap2.segments[0].terms if t[0] != 0.0]
    if len(terms) != 1 or terms[0][2] != 0:
        raise SolverError(f"unexpected bilaplacian terms {terms}")
    return terms[0][0], terms[0][1]


def _check_alpha_D(alpha: float, D: float) -> None:
    if not 0.0 < alpha < 1.0:
        raise DomainError("--alpha must lie in (0, 1)")
    if not D > 1.0:
        raise DomainError("--D must exceed 1")


class _LoadRule:
    """Quadrature for ``2 pi^2 ∫ Δ^2 psi * w(r) * phi_j r^3 dr``.

    The weight ``r^(alpha - 1)`` of the first element is absorbed into a
    Gauss-Jacobi rule; all other elements use Gauss-Legendre.
    """

    def __init__(self, grid: RadialGrid, alpha: float, D: float, order: int = 8):
        coef, expo = bilaplacian_obstacle(alpha, D)
        self.coef = coef
        s = expo + 3.0  # power of r in Δ^2 psi * r^3
        r = grid.nodes
        h = np.diff(r)
        tq, wq = _gauss(order)
        t = np.tile(tq, (h.size, 1))
        w = np.tile(wq, (h.size, 1)) * h[:, None] * coef * r_pow(r[:-1, None] + h[:, None] * t, s)
        # first element: ∫_0^h r^s f dr = h^(s+1) ∫_0^1 t^s f(h t) dt
        xj, wj = roots_jacobi(order, 0.0, s)
        t[0] = 0.5 * (xj + 1.0)
        w[0] = wj * 0.5 ** (s + 1.0) * h[0] ** (s + 1.0) * coef
        self.t, self.w = t, w * TWO_PI2
        self.r = r[:-1, None] + h[:, None] * t
        self.H, _, _ = _hermite(t, h[:, None])
        self.psi = 1.0 - D * self.r**alpha
        self.dofs = _element_dofs(h.size)
        self.n_all = 2 * r.size
        self.nf = grid.n_free

    def values(self, u: np.ndarray) -> np.ndarray:
        ue = _pad(u, self.n_all)[self.dofs]  # (E, 4)
        return np.einsum("eqk,ek->eq", self.H, ue)

    def load(self, u: np.ndarray, eps: float, weight=None) -> np.ndarray:
        th = theta(self.values(u) - self.psi, eps) if weight is None else weight
        contrib = np.einsum("eq,eqk->ek", self.w * th, self.H)
        out = np.bincount(self.dofs.ravel(), contrib.ravel(), minlength=self.n_all)
        return out[: self.nf]

    def jacobian(self, u: np.ndarray, eps: float) -> sp.csc_matrix:
        """Derivative of the load with respect to the unknowns (negative semidefinite)."""
        sl = theta_slope(self.values(u) - self.psi, eps)
        ww = self.w * sl
        Ke = np.einsum("eq,eqi,eqj->eij", ww, self.H, self.H)
        rows = np.repeat(self.dofs, 4, axis=1).ravel()
        cols = np.tile(self.dofs, (1, 4)).ravel()
        J = sp.coo_matrix((Ke.ravel(), (rows, cols)), shape=(self.n_all, self.n_all)).tocsc()
        return J[: self.nf, : self.nf]


def r_pow(r: np.ndarray, s: float) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.where(r > 0, np.abs(r) ** s, 0.0)


def _pad(u: np.ndarray, n_all: int) -> np.ndarray:
    out = np.zeros(n_all)
    out[: u.size] = u
    return out


# ------------------------------------------------------------ results


@dataclass
class SolveResult:
    method: str
    alpha: float
    D: float
    grid: RadialGrid
    unknowns: np.ndarray
    energy: float
    contact_radius: float
    feasibility_gap: float
    trace: list = field(default_factory=list)
    multipliers: np.ndarray | None = None
    kkt_residual: float | None = None

    @property
    def profile(self) -> RadialProfile:
        return element_profile(self.grid, self.unknowns)

    @property
    def nodal_values(self) -> np.ndarray:
        return np.append(self.unknowns[0::2], 0.0)

    def to_json(self, full: bool = True) -> dict:
        d = {
            "method": self.method, "alpha": self.alpha, "D": self.D,
            "grid_n": self.grid.n_elements, "grading": self.grid.grading,
            "energy": self.energy, "contact_radius": self.contact_radius,
            "feasibility_gap": self.feasibility_gap, "kkt_residual": self.kkt_residual,
            "trace": self.trace,
        }
        if full:
            d["profile"] = self.profile.to_json()
        return d


def _contact_radius(grid: RadialGrid, u: np.ndarray, psi_nodes: np.ndarray) -> float:
    """Largest node radius where ``u - psi`` is within ``1e-6 * max|u|``."""
    vals = u[0::2]
    tol = 1e-6 * max(np.abs(vals).max(), 1e-300)
    touching = np.flatnonzero(vals - psi_nodes <= tol)
    return float(grid.nodes[touching[-1]]) if touching.size else 0.0


def _result(method, alpha, D, grid, E: DiscreteEnergy, u, trace, mult=None, kkt=None) -> SolveResult:
    psi = 1.0 - D * grid.nodes[:-1] ** alpha
    gap = float(max(0.0, (psi - u[0::2]).max()))
    if mult is not None and np.any(mult > 0):
        # complementarity identifies the discrete contact set exactly
        contact = float(grid.nodes[np.flatnonzero(mult > 0)[-1]])
    else:
        contact = _contact_radius(grid, u, psi)
    return SolveResult(method, alpha, D, grid, u, E.energy(u), contact, gap, trace, mult, kkt)


# --------------------------------------------------------------- QP oracle


def _kkt_residual(A: sp.spmatrix, u: np.ndarray, mu: np.ndarray, psi: np.ndarray) -> float:
    """Largest of the stationarity, feasibility, sign and complementarity defects.

    Stationarity is measured componentwise, ``|Au - B^T mu|_i / (|A||u| + |B^T mu|)_i``,
    which is the backward error of the linear system and insensitive to the
    very different scales of value and slope unknowns on graded grids.
    """
    full_mu = np.zeros_like(u)
    full_mu[0::2] = mu
    denom = abs(A) @ np.abs(u) + np.abs(full_mu)
    denom[denom == 0] = 1.0
    stat = float((np.abs(A @ u - full_mu) / denom).max())
    gap = u[0::2] - psi
    uscale = max(np.abs(u[0::2]).max(), 1.0)
    mscale = max(np.abs(mu).max(), 1e-300)
    primal = max(0.0, -gap.min()) / uscale
    dual = max(0.0, -mu.min()) / mscale
    comp = np.abs(mu * gap).max() / (mscale * uscale)
    return float(max(stat, primal, dual, comp))


def _scaled(A: sp.spmatrix):
    d = 1.0 / np.sqrt(A.diagonal())
    S = sp.diags(d)
    return (S @ A @ S).tocsc(), d


def _solve_with_active(A: sp.csc_matrix, As: sp.csc_matrix, d: np.ndarray, psi: np.ndarray,
                       active: np.ndarray) -> np.ndarray:
    """Minimiser of ``u^T A u`` with ``u_i = psi_i`` on the active value unknowns."""
    n = A.shape[0]
    vals = np.arange(0, n, 2)[active]
    u = np.zeros(n)
    u[vals] = psi[active]
    free = np.ones(n, bool)
    free[vals] = False
    fi = np.flatnonzero(free)
    rhs = -(A[:, vals] @ psi[active])[fi]
    try:
        y = splu(As[fi][:, fi].tocsc()).solve(rhs * d[fi])
    except RuntimeError as exc:
        raise SolverError(f"singular reduced system: {exc}") from exc
    u[fi] = y * d[fi]
    return u


def _multipliers(A, u, active):
    mu = (A @ u)[0::2]
    mu[~active] = 0.0
    return mu


def _pdas(A, As, d, psi, active, max_iter: int, trace: list):
    c = A.diagonal()[0::2]
    seen = set()
    for it in range(max_iter):
        key = active.tobytes()
        if key in seen:
            trace.append({"iter": it, "event": "cycle"})
            return None, active
        seen.add(key)
        u = _solve_with_active(A, As, d, psi, active)
        mu = _multipliers(A, u, active)
        new = (mu + c * (psi - u[0::2])) > 0
        trace.append({"iter": it, "active": int(active.sum()), "changed": int((new != active).sum())})
        if np.array_equal(new, active):
            return (u, mu), active
        active = new
    trace.append({"iter": max_iter, "event": "max_iter"})
    return None, active


def _primal_active_set(A, As, d, psi, active, max_iter: int, trace: list):
    """Feasible active-set method: strictly decreasing energy, hence finite."""
    # grow the working set until the equality-constrained minimiser is feasible
    while True:
        u = _solve_with_active(A, As, d, psi, active)
        viol = u[0::2] < psi
        if not viol.any():
            break
        active = active | viol
    for it in range(max_iter):
        target = _solve_with_active(A, As, d, psi, active)
        step = target - u
        if np.abs(step).max() <= 1e-14 * max(np.abs(u).max(), 1.0):
            mu = _multipliers(A, u, active)
            trace.append({"iter": it, "event": "primal", "active": int(active.sum()), "min_mu": float(mu.min())})
            neg = np.flatnonzero(mu < -1e-12 * max(np.abs(mu).max(), 1e-300))
            if neg.size == 0:
                return u, mu
            active = active.copy()
            active[neg[0]] = False  # smallest index first, to avoid degenerate cycling
            continue
        sv = step[0::2]
        gap = u[0::2] - psi
        cand = (~active) & (sv < 0)
        ratios = np.full(psi.size, np.inf)
        ratios[cand] = np.maximum(gap[cand], 0.0) / (-sv[cand])
        best = ratios.min()
        k = int(np.flatnonzero(ratios <= best)[0]) if np.isfinite(best) else 0
        t = min(1.0, float(best))
        u = u + t * step
        if t < 1.0:
            active = active.copy()
            active[k] = True
            u[2 * k] = psi[k]
    trace.append({"event": "max_iter", "iter": max_iter})
    return None


def qp_oracle(alpha: float, D: float, grid: RadialGrid, max_iter: int | None = None,
              energy: DiscreteEnergy | None = None) -> SolveResult:
    """Minimise ``u^T A u`` subject to ``u(r_i) >= 1 - D r_i^alpha`` at every free node."""
    _check_alpha_D(alpha, D)
    E = energy or assemble(grid)
    psi = 1.0 - D * grid.nodes[:-1] ** alpha
    trace: list = []
    As, d = _scaled(E.A)
    out, active = _pdas(E.A, As, d, psi, psi > 0, max_iter or 4 * psi.size, trace)
    method = "pdas"
    if out is None:
        out = _primal_active_set(E.A, As, d, psi, active, 20 * psi.size, trace)
        method = "primal_active_set"
    if out is None:
        raise NonConvergence("active-set iterations exhausted", trace)
    u, mu = out
    kkt = _kkt_residual(E.A, u, mu, psi)
    if kkt > TOL.kkt:
        raise NonConvergence(f"KKT residual {kkt:.3g} above {TOL.kkt:g}", trace)
    return _result(method, alpha, D, grid, E, u, trace, mu, kkt)


# ------------------------------------------------------------ penalised


@dataclass(frozen=True)
class PenalizationConfig:
    schedule: tuple[float, ...] = (1e-2, 1e-3, 1e-4, 1e-5, 1e-6)
    inner_tol: float = 1e-10
    max_inner: int = 100
    damping: float = 1.0

    def __post_init__(self) -> None:
        s = np.asarray(self.schedule, float)
        if s.size == 0 or np.any(s <= 0) or np.any(np.diff(s) >= 0):
            raise DomainError("eps schedule must be positive and strictly decreasing")
        if not 0.0 < self.damping <= 1.0:
            raise DomainError("damping must lie in (0, 1]")

    @classmethod
    def geometric(cls, first: float = 1e-2, last: float = 1e-6, ratio: float = 0.1, **kw):
        n = int(round(math.log(last / first) / math.log(ratio))) + 1
        return cls(tuple(first * ratio**k for k in range(n)), **kw)


def _newton_stage(A, rule: _LoadRule, u: np.ndarray, eps: float, cfg: PenalizationConfig, trace: list):
    absA = abs(A)

    def residual(v):
        load = rule.load(v, eps)
        F = A @ v - load
        denom = absA @ np.abs(v) + np.abs(load)
        denom[denom == 0] = 1.0
        return F, float((np.abs(F) / denom).max())

    F, res = residual(u)
    for it in range(cfg.max_inner):
        trace.append({"eps": eps, "iter": it, "residual": res})
        if res <= cfg.inner_tol:
            return u
        J = (A - rule.jacobian(u, eps)).tocsc()
        try:
            step = splu(J).solve(-F)
        except RuntimeError as exc:
            raise SolverError(f"singular linearisation at eps={eps:g}: {exc}") from exc
        if not np.all(np.isfinite(step)):
            raise SolverError("non-finite Newton step")
        lam = cfg.damping
        for _ in range(40):
            trial = u + lam * step
            F_new, res_new = residual(trial)
            if res_new < res or res_new <= cfg.inner_tol:
                break
            lam *= 0.5
        else:
            raise NonConvergence(f"line search failed at eps={eps:g}", trace)
        trace[-1]["step"] = lam
        u, F, res = trial, F_new, res_new
    raise NonConvergence(f"no convergence within {cfg.max_inner} iterations at eps={eps:g}", trace)


@dataclass
class PenalizedPath:
    """Results at every stage of the schedule (the last one is ``final``)."""

    stages: list[SolveResult]

    @property
    def final(self) -> SolveResult:
        return self.stages[-1]

    def gaps(self) -> list[float]:
        return [s.feasibility_gap for s in self.stages]

    def energies(self) -> list[float]:
        return [s.energy for s in self.stages]


def solve_penalized(alpha: float, D: float, grid: RadialGrid, cfg: PenalizationConfig | None = None,
                    eps: float | None = None, energy: DiscreteEnergy | None = None,
                    path: bool = False):
    """Penalised problem along the schedule; ``eps`` truncates the schedule at that value."""
    _check_alpha_D(alpha, D)
    cfg = cfg or PenalizationConfig()
    sched = [e for e in cfg.schedule if eps is None or e >= eps * (1 - 1e-12)]
    if eps is not None and (not sched or abs(sched[-1] - eps) > 1e-12 * eps):
        sched.append(eps)
    E = energy or assemble(grid)
    rule = _LoadRule(grid, alpha, D)
    u = np.zeros(grid.n_free)
    trace: list = []
    stages = []
    for e in sched:
        u = _newton_stage(E.A, rule, u, e, cfg, trace)
        stages.append(_result("penalized", alpha, D, grid, E, u.copy(), [t for t in trace if t["eps"] == e]))
    stages[-1].trace = trace
    return PenalizedPath(stages) if path else stages[-1]


def load_sign_ok(alpha: float, D: float, grid: RadialGrid) -> bool:
    """Value-unknown loads of ``Δ^2 psi`` are nonnegative (Hermite value shapes are >= 0)."""
    rule = _LoadRule(grid, alpha, D)
    full = rule.load(np.zeros(grid.n_free), 1.0, weight=np.ones_like(rule.w))
    return bool(rule.coef > 0 and np.all(full[0::2] >= 0))


# ------------------------------------------------------------ cross check


@dataclass
class CrossValidation:
    alpha: float
    x: float
    D: float
    closed_energy: float
    qp: SolveResult
    penalized: SolveResult | None
    qp_energy_rel: float
    pen_energy_rel: float | None
    pen_vs_qp_rel: float | None
    qp_profile_sup_error: float
    contact_error_cells: float
    gaps: list[float]

    def to_json(self) -> dict:
        return {
            "alpha": self.alpha, "x": self.x, "D": self.D, "closed_energy": self.closed_energy,
            "qp_energy": self.qp.energy, "penalized_energy": self.penalized.energy if self.penalized else None,
            "qp_energy_rel": self.qp_energy_rel, "pen_energy_rel": self.pen_energy_rel,
            "pen_vs_qp_rel": self.pen_vs_qp_rel, "qp_profile_sup_error": self.qp_profile_sup_error,
            "qp_contact_radius": self.qp.contact_radius, "contact_error_cells": self.contact_error_cells,
            "qp_kkt": self.qp.kkt_residual, "feasibility_gaps": self.gaps,
        }


def _cells_between(grid: RadialGrid, a: float, b: float) -> float:
    lo, hi = sorted((a, b))
    return float(np.count_nonzero((grid.nodes > lo) & (grid.nodes <= hi)))


def cross_validate(alpha: float, x: float, grid: RadialGrid, cfg: PenalizationConfig | None = None,
                   penalized: bool = True) -> CrossValidation:
    """Run both solvers at ``D = D(x)`` and compare with the closed-form minimizer."""
    m = coefficients_from_contact(alpha, x)
    exact = m.D**2 * energy_density(alpha, x)
    E = assemble(grid)
    qp = qp_oracle(alpha, m.D, grid, energy=E)
    ref = minimizer_profile(m)
    sup_err = float(np.abs(qp.nodal_values - ref(grid.nodes)).max())
    pen = None
    gaps: list[float] = []
    if penalized:
        path_ = solve_penalized(alpha, m.D, grid, cfg, energy=E, path=True)
        pen = path_.final
        gaps = path_.gaps()
    return CrossValidation(
        alpha, x, m.D, exact, qp, pen,
        qp.energy / exact - 1.0,
        None if pen is None else pen.energy / exact - 1.0,
        None if pen is None else pen.energy / qp.energy - 1.0,
        sup_err,
        _cells_between(grid, qp.contact_radius, m.r0),
        gaps,
    )


def discrete_variational_gap(result: SolveResult, A: sp.spmatrix, rng: np.random.Generator,
                             n_tests: int = 20) -> float:
    """``min_v (v - u)^T A u`` over random nodally feasible ``v`` (should be >= 0)."""
    u = result.unknowns
    psi = 1.0 - result.D * result.grid.nodes[:-1] ** result.alpha
    Au = A @ u
    worst = math.inf
    for _ in range(n_tests):
        v = u.copy()
        bump = rng.random(psi.size) * rng.random() * 0.1
        v[0::2] = np.maximum(u[0::2] + bump - 0.05 * rng.random() * (u[0::2] > psi + 0.1), psi)
        v[1::2] += 0.05 * rng.standard_normal(psi.size)
        worst = min(worst, float((v - u) @ Au))
    return worst
