"""Output helpers: hashing, atomic writes, CSV/JSON/SVG emitters and records."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import os
import tempfile
from dataclasses import asdict, dataclass, field, is_dataclass
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

OUTPUT_ENV = "SHARPLOG_OUTPUT"


def tool_version() -> str:
    try:
        from importlib.metadata import version

        return version("artifact")
    except Exception:  # pragma: no cover - editable checkouts without metadata
        return "0+unknown"


def jsonable(obj: Any) -> Any:
    """Recursively convert numpy scalars/arrays, dataclasses and tuples to JSON types."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    if is_dataclass(obj) and not isinstance(obj, type):
        return jsonable(asdict(obj))
    if isinstance(obj, Path):
        return str(obj)
    return obj


def canonical_json(obj: Any) -> str:
    return json.dumps(jsonable(obj), sort_keys=True, indent=2) + "\n"


def config_hash(config: dict) -> str:
    """First 16 hex digits of the SHA-256 of the canonical config JSON."""
    text = json.dumps(jsonable(config), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def atomic_write_text(path: Path, text: str) -> Path:
    """Write through a temporary file in the same directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def format_cell(v: Any) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return f"{v:.17g}"
    return "" if v is None else str(v)


def csv_text(header: Sequence[str], rows: Iterable[Sequence[Any] | dict]) -> str:
    """Comma-separated text with a mandatory header and 17 significant digits."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        if isinstance(row, dict):
            row = [row.get(h) for h in header]
        w.writerow([format_cell(v) for v in row])
    return buf.getvalue()


def write_csv(path: Path, header: Sequence[str], rows) -> Path:
    return atomic_write_text(path, csv_text(header, rows))


def write_json(path: Path, obj: Any) -> Path:
    return atomic_write_text(path, canonical_json(obj))


# ----------------------------------------------------------------------- SVG


@dataclass
class Series:
    label: str
    x: Sequence[float]
    y: Sequence[float]
    dashed: bool = False


_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf")


def _ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    step = 10 ** math.floor(math.log10((hi - lo) / n))
    for m in (1, 2, 5, 10):
        if (hi - lo) / (m * step) <= n:
            step *= m
            break
    start = math.ceil(lo / step) * step
    return [start + i * step for i in range(int((hi - start) / step) + 1)]


def svg_plot(series: Sequence[Series], title: str, xlabel: str, ylabel: str, logx: bool = False,
             width: int = 640, height: int = 420) -> str:
    """Line plot written directly as SVG paths; ``logx`` uses log10 of x."""
    ml, mr, mt, mb = 70, 20, 40, 50
    pw, ph = width - ml - mr, height - mt - mb

    def tx(v):
        return math.log10(v) if logx else v

    xs = [tx(v) for s in series for v in s.x if (v > 0 or not logx) and math.isfinite(v)]
    ys = [v for s in series for v in s.y if math.isfinite(v)]
    if not xs or not ys:
        xs, ys = [0.0, 1.0], [0.0, 1.0]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y1 = y0 + 1.0
    pad = 0.05 * (y1 - y0)
    y0, y1 = y0 - pad, y1 + pad

    def px(v):
        return ml + (tx(v) - x0) / (x1 - x0) * pw

    def py(v):
        return mt + (1.0 - (v - y0) / (y1 - y0)) * ph

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
           f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
           f'<text x="{width / 2:.1f}" y="22" text-anchor="middle" font-size="14">{_esc(title)}</text>',
           f'<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" fill="none" stroke="black"/>']
    for t in _ticks(x0, x1):
        X = ml + (t - x0) / (x1 - x0) * pw
        lab = f"1e{t:g}" if logx else f"{t:g}"
        out.append(f'<line x1="{X:.2f}" y1="{mt + ph}" x2="{X:.2f}" y2="{mt + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{X:.2f}" y="{mt + ph + 18}" text-anchor="middle">{lab}</text>')
    for t in _ticks(y0, y1):
        Y = py(t)
        out.append(f'<line x1="{ml - 5}" y1="{Y:.2f}" x2="{ml}" y2="{Y:.2f}" stroke="black"/>')
        out.append(f'<text x="{ml - 8}" y="{Y + 4:.2f}" text-anchor="end">{t:.4g}</text>')
    out.append(f'<text x="{ml + pw / 2:.1f}" y="{height - 10}" text-anchor="middle">{_esc(xlabel)}</text>')
    out.append(f'<text x="16" y="{mt + ph / 2:.1f}" text-anchor="middle" '
               f'transform="rotate(-90 16 {mt + ph / 2:.1f})">{_esc(ylabel)}</text>')
    for i, s in enumerate(series):
        pts = [(px(a), py(b)) for a, b in zip(s.x, s.y)
               if math.isfinite(b) and (a > 0 or not logx) and math.isfinite(a)]
        if not pts:
            continue
        d = "M" + " L".join(f"{a:.2f},{b:.2f}" for a, b in pts)
        color = _COLORS[i % len(_COLORS)]
        dash = ' stroke-dasharray="6,4"' if s.dashed else ""
        out.append(f'<path d="{d}" fill="none" stroke="{color}" stroke-width="1.5"{dash}/>')
        ly = mt + 16 + 16 * i
        out.append(f'<line x1="{ml + pw - 150}" y1="{ly - 4}" x2="{ml + pw - 130}" y2="{ly - 4}" '
                   f'stroke="{color}"{dash}/>')
        out.append(f'<text x="{ml + pw - 125}" y="{ly}">{_esc(s.label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _esc(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


# ------------------------------------------------------------------- records


@dataclass
class Assertion:
    """One checked property.

    ``invariant`` names the module-level property it tests and ``claim`` the
    verified statement it contributes to in the summary table.
    """

    name: str
    invariant: str
    passed: bool
    claim: str = ""
    value: Any = None
    bound: Any = None
    detail: str = ""


@dataclass
class ReportRecord:
    experiment_id: str
    command: str
    config: dict
    config_hash: str
    outputs: dict = field(default_factory=dict)
    assertions: list[Assertion] = field(default_factory=list)
    results: dict = field(default_factory=dict)
    tool_version: str = field(default_factory=tool_version)
    wall_time: float = 0.0
    error: str | None = None

    @property
    def passed(self) -> bool:
        return self.error is None and all(a.passed for a in self.assertions)

    def failures(self) -> list[Assertion]:
        return [a for a in self.assertions if not a.passed]

    def to_json(self, include_time: bool = False) -> dict:
        d = {
            "experiment_id": self.experiment_id, "command": self.command, "config": self.config,
            "config_hash": self.config_hash, "outputs": self.outputs,
            "assertions": [asdict(a) for a in self.assertions], "results": self.results,
            "tool_version": self.tool_version, "passed": self.passed, "error": self.error,
        }
        if include_time:
            d["wall_time"] = self.wall_time
        return jsonable(d)

    @classmethod
    def from_json(cls, d: dict) -> "ReportRecord":
        rec = cls(d["experiment_id"], d["command"], d["config"], d["config_hash"], d.get("outputs", {}),
                  [Assertion(**a) for a in d.get("assertions", [])], d.get("results", {}),
                  d.get("tool_version", ""), d.get("wall_time", 0.0), d.get("error"))
        return rec


def output_root(explicit: str | None = None) -> Path:
    """``explicit``, else ``$SHARPLOG_OUTPUT``, else ``./sharplog-out``."""
    return Path(explicit or os.environ.get(OUTPUT_ENV) or "sharplog-out")


__all__ = [
    "OUTPUT_ENV", "tool_version", "jsonable", "canonical_json", "config_hash", "atomic_write_text",
    "format_cell", "csv_text", "write_csv", "write_json", "Series", "svg_plot", "Assertion",
    "ReportRecord", "output_root",
]
