"""Radial functions on balls of R^4: representation, operators and norms.

A :class:`RadialProfile` is an ordered tiling of ``[0, R]`` by segments.  Each
segment is either a closed form (reducible to a finite sum of terms
``coef * r**p * log(r)**m`` with ``m`` in ``{0, 1}``), a sampled profile
(cubic Hermite or piecewise linear), or a derived segment that evaluates the
first derivative or the radial Laplacian of another segment.

The Hölder seminorm of a radial function is computed over pairs of radii only:
for x, y in R^4 one has ``|x - y| >= ||x| - |y||`` and collinear points realise
equality, so the supremum over the plane reduces to the supremum over radii.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
from scipy.interpolate import CubicHermiteSpline
from scipy.optimize import minimize_scalar
from scipy.special import roots_jacobi, roots_legendre

from .errors import DivergenceError, DomainError, UnsupportedOperation
from .tolerances import TOL

BALL_AREA = 2.0 * math.pi**2  # surface measure of the unit sphere S^3

CLOSED_KINDS = ("power", "biharmonic_log", "polynomial", "logpow")
KINDS = CLOSED_KINDS + ("sampled", "derived")

Term = tuple[float, float, int]


# ---------------------------------------------------------------- term algebra


def _simplify(terms: Iterable[Term]) -> list[Term]:
    acc: dict[tuple[float, int], float] = {}
    for coef, p, m in terms:
        if coef == 0.0:
            continue
        key = (float(p), int(m))
        acc[key] = acc.get(key, 0.0) + float(coef)
    return [(c, p, m) for (p, m), c in sorted(acc.items()) if c != 0.0]


def _d_terms(terms: Iterable[Term]) -> list[Term]:
    out: list[Term] = []
    for coef, p, m in terms:
        if p != 0.0:
            out.append((coef * p, p - 1.0, m))
        if m >= 1:
            out.append((coef * m, p - 1.0, m - 1))
    return _simplify(out)


def _shift(terms: Iterable[Term], dp: float, scale: float = 1.0) -> list[Term]:
    return [(scale * c, p + dp, m) for c, p, m in terms]


def _lap_terms(terms: Sequence[Term]) -> list[Term]:
    d1 = _d_terms(terms)
    return _simplify(_d_terms(d1) + _shift(d1, -1.0, 3.0))


def _eval_terms(terms: Sequence[Term], r: np.ndarray) -> np.ndarray:
    out = np.zeros_like(r, dtype=float)
    pos = r > 0
    rp = r[pos]
    logr = np.log(rp) if rp.size else rp
    for coef, p, m in terms:
        out[pos] += coef * rp**p * (logr**m if m else 1.0)
        if not pos.all():
            zero = ~pos
            if p > 0:
                continue
            if p == 0 and m == 0:
                out[zero] += coef
            else:
                out[zero] = math.copysign(math.inf, coef) if m == 0 else -math.copysign(math.inf, coef)
    return out


def _dilate_terms(terms: Sequence[Term], R: float) -> list[Term]:
    """Terms of r -> f(r / R)."""
    logR = math.log(R)
    out: list[Term] = []
    for coef, p, m in terms:
        c = coef * R ** (-p)
        out.append((c, p, m))
        if m == 1:
            out.append((-c * logR, p, 0))
    return _simplify(out)


# -------------------------------------------------------------------- segments


@dataclass(frozen=True, eq=False)
class Segment:
    """One piece of a radial profile on the closed interval ``[lo, hi]``."""

    lo: float
    hi: float
    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise DomainError(f"unknown segment kind {self.kind!r}")
        if not self.hi > self.lo >= 0.0:
            raise DomainError(f"bad segment interval [{self.lo}, {self.hi}]")

    # closed forms reduce to term lists
    @cached_property
    def terms(self) -> list[Term] | None:
        k, q = self.kind, self.params
        if k == "power":
            return _simplify([(q.get("c", 0.0), 0.0, 0), (q["k"], q["p"], 0)])
        if k == "biharmonic_log":
            b, c = q["b"], q["c"]
            return _simplify([(b, 2.0, 0), (-b - c, 0.0, 0), (c, -2.0, 0), (2.0 * (c - b), 0.0, 1)])
        if k == "polynomial":
            return _simplify([(a, float(n), 0) for n, a in enumerate(q["coeffs"])])
        if k == "logpow":
            return _simplify([(float(c), float(p), int(m)) for c, p, m in q["terms"]])
        return None

    @cached_property
    def _spline(self):
        q = self.params
        nodes = np.asarray(q["nodes"], float)
        vals = np.asarray(q["values"], float)
        slopes = q.get("slopes")
        if slopes is None:
            return None
        return CubicHermiteSpline(nodes, vals, np.asarray(slopes, float))

    @cached_property
    def _of(self) -> "Segment":
        return segment_from_json(self.params["of"])

    @property
    def differentiable(self) -> bool:
        if self.kind == "sampled":
            return self.params.get("slopes") is not None
        if self.kind == "derived":
            return self._of.differentiable
        return True

    def deriv(self, r, order: int = 0) -> np.ndarray:
        """Value (``order=0``) or derivative of the segment at radii ``r``."""
        r = np.asarray(r, float)
        if self.terms is not None:
            t = self.terms
            for _ in range(order):
                t = _d_terms(t)
            return _eval_terms(t, r)
        if self.kind == "sampled":
            q = self.params
            if self._spline is None:
                if order == 0:
                    return np.interp(r, q["nodes"], q["values"])
                raise UnsupportedOperation("piecewise-linear samples are not differentiable")
            return self._spline(r, nu=order) if order <= 3 else np.zeros_like(r)
        # derived segment
        op = self.params["op"]
        base = self._of
        if op == "d1":
            return base.deriv(r, order + 1)
        if op == "lap":
            if order > 1:
                raise UnsupportedOperation("derivatives of order > 1 of a derived Laplacian")
            with np.errstate(divide="ignore", invalid="ignore"):
                if order == 0:
                    return base.deriv(r, 2) + 3.0 * base.deriv(r, 1) / r
                d1, d2, d3 = base.deriv(r, 1), base.deriv(r, 2), base.deriv(r, 3)
                return d3 + 3.0 * d2 / r - 3.0 * d1 / r**2
        raise UnsupportedOperation(f"unknown derived op {op!r}")

    def __call__(self, r) -> np.ndarray:
        return self.deriv(r, 0)

    def lowest_power(self) -> float | None:
        """Smallest exponent among the closed-form terms (None for other kinds)."""
        if self.terms is None:
            return None
        return min((p for _, p, _ in self.terms), default=0.0)

    def laplacian(self) -> "Segment":
        if not self.differentiable:
            raise UnsupportedOperation(f"segment kind {self.kind!r} is not twice differentiable")
        if self.kind == "power":
            k, p = self.params["k"], self.params["p"]
            return Segment(self.lo, self.hi, "power", {"c": 0.0, "k": k * p * (p + 2.0), "p": p - 2.0})
        if self.terms is not None:
            return Segment(self.lo, self.hi, "logpow", {"terms": [list(t) for t in _lap_terms(self.terms)]})
        return Segment(self.lo, self.hi, "derived", {"op": "lap", "of": self.to_json()})

    def derivative(self) -> "Segment":
        if not self.differentiable:
            raise UnsupportedOperation(f"segment kind {self.kind!r} is not differentiable")
        if self.kind == "power":
            k, p = self.params["k"], self.params["p"]
            return Segment(self.lo, self.hi, "power", {"c": 0.0, "k": k * p, "p": p - 1.0})
        if self.terms is not None:
            return Segment(self.lo, self.hi, "logpow", {"terms": [list(t) for t in _d_terms(self.terms)]})
        return Segment(self.lo, self.hi, "derived", {"op": "d1", "of": self.to_json()})

    def dilate(self, R: float) -> "Segment":
        """Segment of r -> f(r / R) on ``[R lo, R hi]``."""
        lo, hi = self.lo * R, self.hi * R
        k, q = self.kind, self.params
        if k == "power":
            return Segment(lo, hi, "power", {"c": q.get("c", 0.0), "k": q["k"] * R ** (-q["p"]), "p": q["p"]})
        if k == "polynomial":
            return Segment(lo, hi, "polynomial", {"coeffs": [a * R ** (-n) for n, a in enumerate(q["coeffs"])]})
        if self.terms is not None:
            return Segment(lo, hi, "logpow", {"terms": [list(t) for t in _dilate_terms(self.terms, R)]})
        if k == "sampled":
            slopes = q.get("slopes")
            return Segment(lo, hi, "sampled", {
                "nodes": [x * R for x in q["nodes"]],
                "values": list(q["values"]),
                "slopes": None if slopes is None else [s / R for s in slopes],
            })
        # derivatives act on the dilated base, so chain-rule factors are automatic
        inner = self._of.dilate(R).to_json()
        return Segment(lo, hi, "derived", {"op": q["op"], "of": inner})

    def to_json(self) -> dict:
        return {"lo": self.lo, "hi": self.hi, "kind": self.kind, "params": _jsonable(self.params)}


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    return obj


def segment_from_json(d: dict) -> Segment:
    return Segment(float(d["lo"]), float(d["hi"]), d["kind"], dict(d.get("params", {})))


# --------------------------------------------------------------------- profile


@dataclass(frozen=True, eq=False)
class RadialProfile:
    """Radial function on ``[0, R]`` given by contiguous segments."""

    R: float
    segments: tuple[Segment, ...]
    h2_admissible: bool = False
    continuous: bool = True

    def __post_init__(self) -> None:
        segs = tuple(self.segments)
        object.__setattr__(self, "segments", segs)
        if not segs:
            raise DomainError("profile needs at least one segment")
        if segs[0].lo != 0.0:
            raise DomainError("first segment must start at r = 0")
        for a, b in zip(segs, segs[1:]):
            if a.hi != b.lo:
                raise DomainError(f"segments do not tile: {a.hi} != {b.lo}")
        if not math.isclose(segs[-1].hi, self.R, rel_tol=1e-14, abs_tol=0.0):
            raise DomainError(f"last segment ends at {segs[-1].hi}, expected R = {self.R}")

    @property
    def breakpoints(self) -> list[float]:
        return [s.lo for s in self.segments] + [self.segments[-1].hi]

    def _index(self, r: np.ndarray, side: str) -> np.ndarray:
        edges = np.array([s.lo for s in self.segments[1:]])
        idx = np.searchsorted(edges, r, side="right" if side == "right" else "left")
        return np.minimum(idx, len(self.segments) - 1)

    def deriv(self, r, order: int = 0, side: str = "right", extend: bool = False) -> np.ndarray:
        """Evaluate the ``order``-th derivative; breakpoints use the ``side`` segment."""
        scalar = np.ndim(r) == 0
        r = np.atleast_1d(np.asarray(r, float))
        if (r < 0).any():
            raise DomainError("negative radius")
        out = np.zeros_like(r)
        inside = r <= self.R * (1 + 1e-15)
        if not extend and not inside.all():
            raise DomainError(f"radius beyond R = {self.R}")
        idx = self._index(r, side)
        for i, seg in enumerate(self.segments):
            mask = inside & (idx == i)
            if mask.any():
                out[mask] = seg.deriv(r[mask], order)
        return out[0] if scalar else out

    def __call__(self, r, side: str = "right", extend: bool = False):
        return self.deriv(r, 0, side=side, extend=extend)

    def map_segments(self, fn, **flags) -> "RadialProfile":
        return RadialProfile(self.R, tuple(fn(s) for s in self.segments), **flags)

    def dilate(self, R: float) -> "RadialProfile":
        """Profile of x -> u(x / R) on the ball of radius ``R * self.R``."""
        if R <= 0:
            raise DomainError("dilation factor must be positive")
        return RadialProfile(self.R * R, tuple(s.dilate(R) for s in self.segments),
                             h2_admissible=self.h2_admissible, continuous=self.continuous)

    def continuity_residuals(self, orders: Sequence[int] = (0, 1)) -> list[dict]:
        """One-sided jumps at every interior breakpoint."""
        out = []
        for a, b in zip(self.segments, self.segments[1:]):
            x = a.hi
            row = {"r": x}
            for k in orders:
                row[f"d{k}"] = float(abs(a.deriv(np.array([x]), k)[0] - b.deriv(np.array([x]), k)[0]))
            out.append(row)
        return out

    def boundary_residuals(self) -> tuple[float, float]:
        last = self.segments[-1]
        x = np.array([self.R])
        return float(abs(last.deriv(x, 0)[0])), float(abs(last.deriv(x, 1)[0]))

    def check_admissible(self, tol: float = 1e-8) -> bool:
        v, d = self.boundary_residuals()
        return v <= tol and d <= tol

    def to_json(self) -> dict:
        return {"R": self.R, "segments": [s.to_json() for s in self.segments],
                "h2_admissible": self.h2_admissible, "continuous": self.continuous}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    @classmethod
    def from_json(cls, d: dict) -> "RadialProfile":
        return cls(float(d["R"]), tuple(segment_from_json(s) for s in d["segments"]),
                   h2_admissible=bool(d.get("h2_admissible", False)),
                   continuous=bool(d.get("continuous", True)))


def single(kind: str, R: float = 1.0, **params) -> RadialProfile:
    return RadialProfile(R, (Segment(0.0, R, kind, params),))


def combine(a: float, p: RadialProfile, b: float, q: RadialProfile) -> RadialProfile:
    """``a p + b q`` for closed-form profiles sharing breakpoints."""
    if p.breakpoints != q.breakpoints:
        raise UnsupportedOperation("profiles must share breakpoints")
    segs = []
    for s, t in zip(p.segments, q.segments):
        if s.terms is None or t.terms is None:
            raise UnsupportedOperation("linear combination needs closed-form segments")
        terms = _simplify(_shift(s.terms, 0.0, a) + _shift(t.terms, 0.0, b))
        segs.append(Segment(s.lo, s.hi, "logpow", {"terms": [list(x) for x in terms]}))
    return RadialProfile(p.R, tuple(segs))


# ------------------------------------------------------------------ operators


def laplacian_radial(p: RadialProfile) -> RadialProfile:
    """Segment-wise ``f'' + (3/r) f'``."""
    return p.map_segments(lambda s: s.laplacian(), continuous=False)


def derivative(p: RadialProfile) -> RadialProfile:
    return p.map_segments(lambda s: s.derivative(), continuous=False)


# ------------------------------------------------------------------ quadrature


@dataclass(frozen=True)
class QuadratureScheme:
    """Geometrically graded panels on ``[0, R]``.

    Panels are ``[R ratio^(k+1), R ratio^k]`` for ``k < levels`` (each split
    into ``subdivisions`` equal parts) plus a first panel ``[0, R ratio^levels]``
    that is integrated with a Gauss-Jacobi rule when the leading power of the
    integrand is known, which is exact for pure powers.
    """

    R: float = 1.0
    levels: int = 48
    ratio: float = 0.5
    order: int = 16
    subdivisions: int = 2

    def __post_init__(self) -> None:
        if not 0.0 < self.ratio < 1.0:
            raise DomainError("grading ratio must lie in (0, 1)")
        if self.order < 2 or self.levels < 1 or self.subdivisions < 1:
            raise DomainError("order, levels and subdivisions must be positive")

    @cached_property
    def nodes(self) -> np.ndarray:
        geo = self.R * self.ratio ** np.arange(self.levels, -1, -1, dtype=float)
        pts = [np.array([0.0])]
        for a, b in zip(geo[:-1], geo[1:]):
            pts.append(np.linspace(a, b, self.subdivisions + 1)[:-1])
        pts.append(np.array([self.R]))
        return np.concatenate(pts)

    @cached_property
    def _gl(self) -> tuple[np.ndarray, np.ndarray]:
        return roots_legendre(self.order)

    def doubled(self) -> "QuadratureScheme":
        return QuadratureScheme(self.R, self.levels, self.ratio, self.order, 2 * self.subdivisions)

    def integrate(self, f, a: float, b: float, exponent: float | None = None,
                  breaks: Sequence[float] = ()) -> float:
        """Integrate ``f`` over ``[a, b]``; ``exponent`` is its leading power at 0."""
        if b <= a:
            return 0.0
        nodes = self.nodes * (max(b, self.R) / self.R) if b > self.R else self.nodes
        cuts = np.unique(np.concatenate([nodes[(nodes > a) & (nodes < b)], [a, b],
                                         [x for x in breaks if a < x < b]]))
        x, w = self._gl
        parts = []
        for lo, hi in zip(cuts[:-1], cuts[1:]):
            if lo == 0.0 and exponent is not None:
                if exponent <= -1.0:
                    raise DivergenceError(f"integrand ~ r^{exponent} is not integrable at 0")
                xj, wj = roots_jacobi(self.order, 0.0, exponent)
                rj = 0.5 * hi * (1.0 + xj)
                vals = np.asarray(f(rj), float) / rj**exponent
                parts.append(float((0.5 * hi) ** (exponent + 1.0) * np.dot(wj, vals)))
            else:
                rj = 0.5 * (hi - lo) * x + 0.5 * (hi + lo)
                parts.append(float(0.5 * (hi - lo) * np.dot(w, np.asarray(f(rj), float))))
        total = math.fsum(parts)
        if not math.isfinite(total):
            raise DivergenceError("integral is not finite")
        return total


DEFAULT_QUAD = QuadratureScheme()


def _power_integral(s: float, a: float, b: float) -> float:
    """Exact integral of r^s over [a, b]."""
    if s == -1.0:
        if a == 0.0:
            raise DivergenceError("r^-1 is not integrable at 0")
        return math.log(b / a)
    if a == 0.0 and s < -1.0:
        raise DivergenceError(f"r^{s} is not integrable at 0")
    return (b ** (s + 1.0) - (a ** (s + 1.0) if a > 0 else 0.0)) / (s + 1.0)


def weighted_l2_norm_sq(p: RadialProfile, q: QuadratureScheme | None = None) -> float:
    """``2 pi^2 int_0^R p(r)^2 r^3 dr``, the squared L^2 norm on the ball."""
    q = q or QuadratureScheme(R=p.R)
    parts = []
    for seg in p.segments:
        lo, hi = seg.lo, seg.hi
        if seg.kind == "power":
            c, k, pw = seg.params.get("c", 0.0), seg.params["k"], seg.params["p"]
            if k == 0.0:
                parts.append(c * c * _power_integral(3.0, lo, hi))
                continue
            parts.append(c * c * _power_integral(3.0, lo, hi))
            parts.append(2.0 * c * k * _power_integral(pw + 3.0, lo, hi))
            parts.append(k * k * _power_integral(2.0 * pw + 3.0, lo, hi))
            continue
        exponent = None
        if lo == 0.0:
            low = seg.lowest_power()
            if low is not None:
                exponent = 2.0 * min(low, 0.0) + 3.0
                if exponent <= -1.0:
                    raise DivergenceError(f"segment ~ r^{low} is not square integrable against r^3")
            elif seg.kind == "derived" and seg.params["op"] == "lap":
                exponent = 1.0
            else:
                exponent = 3.0
        breaks = seg.params.get("nodes", []) if seg.kind == "sampled" else ()
        if seg.kind == "derived":
            inner = seg._of
            breaks = inner.params.get("nodes", []) if inner.kind == "sampled" else ()
        parts.append(q.integrate(lambda r, s=seg: s(r) ** 2 * r**3, lo, hi, exponent, breaks))
    return BALL_AREA * math.fsum(parts)


# -------------------------------------------------------------- sup and Hölder


def _candidate_radii(p: RadialProfile, n_uniform: int = 600, n_log: int = 400) -> np.ndarray:
    R = p.R
    bps = np.array(p.breakpoints)
    inner = bps[(bps > 0) & (bps < R)]
    smallest = inner.min() if inner.size else R
    rmin = min(1e-7 * R, 1e-4 * smallest)
    pts = [bps, np.linspace(0.0, R, n_uniform), np.geomspace(rmin, R, n_log)]
    offsets = R * np.geomspace(1e-9, 0.2, 40)
    for b in inner:
        pts.append(b - offsets * b / R)
        pts.append(b + offsets)
        pts.append(b * np.geomspace(1e-6, 1.0, 60))
    for seg in p.segments:
        if seg.kind == "sampled":
            pts.append(np.asarray(seg.params["nodes"], float))
    r = np.concatenate(pts)
    return np.unique(r[(r >= 0) & (r <= R)])


def _check_bounded(p: RadialProfile) -> None:
    first = p.segments[0]
    low = first.lowest_power()
    if low is not None:
        singular = [t for t in first.terms if t[1] < 0 or (t[1] == 0 and t[2] > 0)]
        if singular:
            raise DivergenceError("profile is unbounded at r = 0")


def _unbounded_slope(p: RadialProfile) -> bool:
    first = p.segments[0]
    if first.terms is None:
        return False
    return any(t[1] < 1.0 and not (t[1] == 0.0 and t[2] == 0) for t in first.terms)


def sup_norm(p: RadialProfile) -> tuple[float, float]:
    """``(max |p|, argmax radius)`` by dense sampling plus bounded refinement."""
    _check_bounded(p)
    r = _candidate_radii(p)
    v = np.abs(p(r))
    i = int(np.argmax(v))
    best, arg = float(v[i]), float(r[i])
    lo, hi = r[max(i - 1, 0)], r[min(i + 1, r.size - 1)]
    if hi > lo:
        res = minimize_scalar(lambda t: -abs(float(p(t))), bounds=(lo, hi), method="bounded",
                              options={"xatol": 1e-14 * p.R})
        if -res.fun > best:
            best, arg = float(-res.fun), float(res.x)
    return best, arg


def lipschitz_seminorm(p: RadialProfile) -> float:
    """``sup |p'|``; infinite when the slope blows up at the origin."""
    _check_bounded(p)
    if _unbounded_slope(p):
        return math.inf
    r = _candidate_radii(p)
    best = 0.0
    for side in ("left", "right"):
        v = np.abs(p.deriv(r, 1, side=side))
        i = int(np.argmax(v))
        best = max(best, float(v[i]))
        lo, hi = r[max(i - 1, 0)], r[min(i + 1, r.size - 1)]
        if hi > lo:
            res = minimize_scalar(lambda t: -abs(float(p.deriv(t, 1, side=side))), bounds=(lo, hi),
                                  method="bounded", options={"xatol": 1e-14 * p.R})
            best = max(best, float(-res.fun))
    return best


def _pair_max(r: np.ndarray, v: np.ndarray, alpha: float, chunk: int = 512):
    best, bi, bj = 0.0, 0, 0
    for s in range(0, r.size, chunk):
        rs, vs = r[s:s + chunk, None], v[s:s + chunk, None]
        d = np.abs(rs - r[None, :])
        with np.errstate(divide="ignore", invalid="ignore"):
            q = np.abs(vs - v[None, :]) / d**alpha
        q[d == 0] = 0.0
        k = int(np.argmax(q))
        if q.flat[k] > best:
            best = float(q.flat[k])
            bi, bj = s + k // r.size, k % r.size
    return best, bi, bj


def holder_seminorm(p: RadialProfile, alpha: float, rounds: int = 3) -> float:
    """``sup |p(r) - p(s)| / |r - s|^alpha`` over radius pairs.

    A dense pair enumeration locates the best pair, which is then refined by
    alternating golden-section searches in each coordinate.
    """
    if not 0.0 < alpha <= 1.0:
        raise DomainError("Hölder exponent must lie in (0, 1]")
    _check_bounded(p)
    if alpha == 1.0:
        return lipschitz_seminorm(p)
    r = _candidate_radii(p)
    v = p(r)
    best, i, j = _pair_max(r, v, alpha)
    if best == 0.0:
        return 0.0

    def ratio(a: float, b: float) -> float:
        d = abs(a - b)
        if d == 0.0:
            return 0.0
        return abs(float(p(a)) - float(p(b))) / d**alpha

    a, b = float(r[i]), float(r[j])
    for _ in range(rounds):
        for which in (0, 1):
            fixed = b if which == 0 else a
            cur = a if which == 0 else b
            k = int(np.searchsorted(r, cur))
            lo, hi = r[max(k - 2, 0)], r[min(k + 2, r.size - 1)]
            if hi <= lo:
                continue
            res = minimize_scalar(lambda t: -ratio(t, fixed), bounds=(lo, hi), method="bounded",
                                  options={"xatol": 1e-15 * p.R})
            if -res.fun > best:
                best = float(-res.fun)
                if which == 0:
                    a = float(res.x)
                else:
                    b = float(res.x)
    return best


# ---------------------------------------------------------------- norm report


@dataclass(frozen=True)
class NormReport:
    sup_norm: float
    l2_ball: float
    grad_l2: float
    lap_l2: float
    lip_seminorm: float
    holder_seminorm: float
    alpha: float
    n_alpha: float | None  # None when lap_l2 == 0

    def interpolation_ok(self, rtol: float = 1e-9) -> bool:
        if math.isinf(self.lip_seminorm):
            return True
        bound = self.sup_norm ** (1 - self.alpha) * self.lip_seminorm**self.alpha
        return self.holder_seminorm <= bound * (1 + rtol) + 1e-300


def norms(p: RadialProfile, alpha: float, q: QuadratureScheme | None = None) -> NormReport:
    q = q or QuadratureScheme(R=p.R)
    sup, _ = sup_norm(p)
    l2 = math.sqrt(weighted_l2_norm_sq(p, q))
    grad = math.sqrt(weighted_l2_norm_sq(derivative(p), q))
    lap = math.sqrt(weighted_l2_norm_sq(laplacian_radial(p), q))
    lip = lipschitz_seminorm(p)
    hol = holder_seminorm(p, alpha)
    return NormReport(sup, l2, grad, lap, lip, hol, alpha, hol / lap if lap > 0 else None)


__all__ = [
    "BALL_AREA", "Segment", "RadialProfile", "QuadratureScheme", "NormReport", "DEFAULT_QUAD",
    "single", "combine", "laplacian_radial", "derivative", "weighted_l2_norm_sq",
    "holder_seminorm", "lipschitz_seminorm", "sup_norm", "norms", "segment_from_json", "TOL",
]
