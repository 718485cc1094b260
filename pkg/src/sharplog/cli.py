"""Command line entry point: ``sharplog <command> [options]``.

Exit status: 0 when every assertion holds, 1 when an assertion fails, 2 for
usage errors and 3 when a module raises.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .experiments import (CLAIMS, COMMANDS, FORMATS, ExperimentConfig, UsageError, parse_tol, resolve,
                          run)
from .report import (ReportRecord, atomic_write_text, canonical_json, config_hash, csv_text, output_root,
                     tool_version)

EXIT_OK, EXIT_ASSERT, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3

# Flags accepted by each command, mapped to ExperimentConfig fields.
COMMAND_FLAGS: dict[str, tuple[str, ...]] = {
    "scan": ("alpha", "lam"),
    "minimizer": ("alpha", "x", "D"),
    "extremal": ("alpha", "eps"),
    "sharpness": ("alpha", "n"),
    "solve-obstacle": ("alpha", "x", "D", "grid_n", "grading", "eps_schedule"),
    "dyadic": ("alpha", "x"),
    "global": ("alpha", "x", "lam", "mu"),
    "report-all": (),
}

_FLAG_SPEC = {
    "alpha": ("--alpha", float, "Hölder exponent in (0, 1)"),
    "lam": ("--lambda", float, "single-log constant, must exceed 1/(8 pi^2 alpha)"),
    "mu": ("--mu", float, "cutoff scale in (0, 1]; default runs 0.25, 0.5 and 1"),
    "x": ("--x", float, "contact variable r0^2 in (0, 1)"),
    "D": ("--D", float, "obstacle amplitude D > 1 (alternative to --x)"),
    "eps": ("--eps", float, "smallest eps of the double-log family, in (0, 1/e]"),
    "n": ("--n", int, "largest index of the sharpness sequence"),
    "grid_n": ("--grid-n", int, "number of finite elements"),
    "grading": ("--grading", float, "mesh grading exponent toward r = 0"),
    "eps_schedule": ("--eps-schedule", None, "comma-separated decreasing penalty parameters"),
}

DEFAULT_SUITE: list[dict] = (
    [{"command": "scan", "alpha": a} for a in (0.3, 0.5, 0.7)]
    + [{"command": "minimizer", "alpha": 0.5, "x": 0.25}, {"command": "minimizer", "alpha": 0.3, "x": 1e-4}]
    + [{"command": "extremal", "alpha": a, "eps": 1e-8} for a in (0.3, 0.5, 0.7)]
    + [{"command": "sharpness", "alpha": 0.5, "n": 10**6},
       {"command": "solve-obstacle", "alpha": 0.5, "x": 0.25, "grid_n": 1024},
       {"command": "dyadic", "alpha": 0.5, "x": 0.25},
       {"command": "global", "alpha": 0.5, "x": 0.25}]
)


def _schedule(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}") from None


def _formats(text: str) -> tuple[str, ...]:
    vals = tuple(v.strip() for v in text.split(",") if v.strip())
    bad = [v for v in vals if v not in FORMATS]
    if bad or not vals:
        raise argparse.ArgumentTypeError(f"formats must be chosen from {','.join(FORMATS)}, got {text!r}")
    return vals


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", help="output root (default: $SHARPLOG_OUTPUT or ./sharplog-out)")
    common.add_argument("--format", dest="formats", type=_formats, default=FORMATS,
                        help="comma-separated subset of csv,json,svg (default: all)")
    common.add_argument("--tol", action="append", default=[], metavar="KEY=VALUE",
                        help="override a named tolerance; repeatable")
    p = argparse.ArgumentParser(prog="sharplog", description="Numerical checks of sharp logarithmic "
                                "L-infinity estimates for radial H^2 functions on the unit ball of R^4.")
    p.add_argument("--version", action="version", version=f"%(prog)s {tool_version()}")
    sub = p.add_subparsers(dest="command", required=True, metavar="command")
    helps = {
        "scan": "scan the contact variable and build admissible constants",
        "minimizer": "closed-form obstacle minimizer and its integrity checks",
        "extremal": "double-log quotient along the extremal family",
        "sharpness": "sequence showing the log estimate fails at the sharp constant",
        "solve-obstacle": "penalized and QP obstacle solvers against the closed form",
        "dyadic": "Littlewood-Paley machinery with calibrated and validated constants",
        "global": "rescaling, whole-space cutoff and global estimates on the corpus",
        "report-all": "run a suite of experiments and print a summary per claim",
    }
    for cmd in COMMANDS:
        sp = sub.add_parser(cmd, parents=[common], help=helps[cmd])
        for key in COMMAND_FLAGS[cmd]:
            flag, typ, hlp = _FLAG_SPEC[key]
            sp.add_argument(flag, dest=key, type=typ or _schedule, default=None, help=hlp)
        if cmd == "report-all":
            sp.add_argument("--suite", help="JSON suite file (list of configs, or {\"experiments\": [...]})")
            sp.add_argument("--jobs", type=int, default=None, help="worker processes (default: CPU count)")
    return p


def _config_from_args(ns: argparse.Namespace) -> ExperimentConfig:
    kw = {k: getattr(ns, k) for k in COMMAND_FLAGS[ns.command]}
    return ExperimentConfig(ns.command, tol=parse_tol(ns.tol), formats=tuple(ns.formats), output=ns.output,
                            suite=getattr(ns, "suite", None), **kw)


def _print_record(rec: ReportRecord, root: Path, stream=None) -> None:
    stream = stream or sys.stdout
    status = "ERROR" if rec.error else ("PASS" if rec.passed else "FAIL")
    print(f"[{status}] {rec.experiment_id}  ->  {root / rec.experiment_id}", file=stream)
    for a in rec.assertions:
        extra = ""
        if a.value is not None:
            extra = f"  value={a.value:.6g}" if isinstance(a.value, float) else f"  value={a.value}"
            if a.bound is not None:
                extra += f" bound={a.bound:.6g}" if isinstance(a.bound, float) else f" bound={a.bound}"
        print(f"    {'ok  ' if a.passed else 'FAIL'} {a.name}{extra}", file=stream)
    if rec.error:
        print(f"    {rec.error}", file=stream)


def _exit_code(records) -> int:
    if any(r.error for r in records):
        return EXIT_INTERNAL
    if any(not r.passed for r in records):
        return EXIT_ASSERT
    return EXIT_OK


# ---------------------------------------------------------------- report-all


def load_suite(path: str | None) -> list[dict]:
    if path is None:
        return [dict(item) for item in DEFAULT_SUITE]
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError("--suite", f"cannot read suite: {exc}") from None
    items = data.get("experiments") if isinstance(data, dict) else data
    if not isinstance(items, list) or not all(isinstance(i, dict) for i in items):
        raise UsageError("--suite", "suite must be a list of objects or {\"experiments\": [...]}")
    return items


def _suite_config(item: dict, base: ExperimentConfig) -> ExperimentConfig:
    item = dict(item)
    cmd = item.pop("command", None)
    if cmd not in COMMANDS or cmd == "report-all":
        raise UsageError("--suite", f"suite item has invalid command {cmd!r}")
    key_map = {"lambda": "lam", "grid-n": "grid_n", "eps-schedule": "eps_schedule"}
    kw = {}
    tol = dict(base.tol)
    for k, v in item.items():
        k = key_map.get(k, k)
        if k == "tol":
            tol.update(parse_tol([f"{a}={b}" for a, b in v.items()]) if isinstance(v, dict) else parse_tol(v))
        elif k in COMMAND_FLAGS[cmd]:
            kw[k] = tuple(v) if k == "eps_schedule" else v
        else:
            raise UsageError("--suite", f"parameter {k!r} is not accepted by {cmd}")
    return resolve(ExperimentConfig(cmd, tol=tol, formats=base.formats, **kw))


def _run_item(args) -> dict:
    cfg, root = args
    return run(cfg, Path(root)).to_json(include_time=True)


def summarize(records: list[ReportRecord]) -> list[dict]:
    """One row per claim, in fixed order; each row lists the producing experiments."""
    rows = []
    for claim in CLAIMS:
        hits = [(r, a) for r in records for a in r.assertions if a.claim == claim]
        errors = sorted({r.experiment_id for r in records if r.error})
        if not hits:
            continue
        failed = [f"{r.experiment_id}:{a.name}" for r, a in hits if not a.passed]
        sources = sorted({a.invariant.split(":")[0] for _, a in hits})
        rows.append({"claim": claim, "status": "FAIL" if failed else "PASS", "assertions": len(hits),
                     "failed": len(failed), "failures": failed, "sources": sources,
                     "experiments": sorted({r.experiment_id for r, _ in hits}),
                     "errors": [e for e in errors if any(r.experiment_id == e for r, _ in hits)]})
    for r in records:
        if r.error:
            rows.append({"claim": f"error in {r.experiment_id}", "status": "ERROR", "assertions": 0, "failed": 0,
                         "failures": [r.error], "sources": [r.command], "experiments": [r.experiment_id],
                         "errors": [r.experiment_id]})
    return rows


def report_all(base: ExperimentConfig, root: Path, jobs: int | None = None,
               stream=None) -> tuple[int, list[ReportRecord]]:
    stream = stream or sys.stdout
    items = load_suite(base.suite)
    configs = [_suite_config(i, base) for i in items]
    t0 = time.perf_counter()
    if jobs == 1 or len(configs) <= 1:
        raw = [_run_item((c, str(root))) for c in configs]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            raw = list(pool.map(_run_item, [(c, str(root)) for c in configs]))
    records = [ReportRecord.from_json(d) for d in raw]
    wall = time.perf_counter() - t0
    summary = summarize(records)
    suite_conf = {"suite": [c.hashed() for c in configs]}
    h = config_hash(suite_conf)
    out_dir = root / f"report-all-{h}"
    summary_doc = {"config_hash": h, "tool_version": tool_version(), "claims": summary,
                   "experiments": [{"experiment_id": r.experiment_id, "command": r.command, "passed": r.passed,
                                    "error": r.error, "failed": [a.name for a in r.failures()]} for r in records]}
    if "json" in base.formats:
        atomic_write_text(out_dir / "summary.json", canonical_json(summary_doc))
        atomic_write_text(out_dir / "suite.json", canonical_json(suite_conf))
    if "csv" in base.formats:
        atomic_write_text(out_dir / "summary.csv", csv_text(
            ["claim", "status", "assertions", "failed", "sources", "experiments"],
            [[s["claim"], s["status"], s["assertions"], s["failed"], " ".join(s["sources"]),
              " ".join(s["experiments"])] for s in summary]))
    atomic_write_text(out_dir / "timing.json", canonical_json(
        {"wall_time": wall, "items": {r.experiment_id: r.wall_time for r in records}}))
    for r in records:
        _print_record(r, root, stream)
    print("", file=stream)
    print(f"{'claim':36s} {'status':7s} {'checks':>6s}  produced by", file=stream)
    for s in summary:
        print(f"{s['claim']:36s} {s['status']:7s} {s['assertions']:6d}  {', '.join(s['sources'])}", file=stream)
        for f in s["failures"]:
            print(f"{'':36s}   - {f}", file=stream)
    if not summary:
        print("(empty suite)", file=stream)
    print(f"\nsummary: {out_dir}  ({wall:.1f} s)", file=stream)
    return _exit_code(records), records


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        base = _config_from_args(ns)
        root = output_root(ns.output)
        if ns.command == "report-all":
            code, _ = report_all(resolve(base), root, getattr(ns, "jobs", None))
            return code
        cfg = resolve(base)
        rec = run(cfg, root)
    except UsageError as exc:
        print(f"sharplog {ns.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # module failures surface verbatim
        print(f"sharplog {ns.command}: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    _print_record(rec, root)
    if rec.error:
        print(f"sharplog {ns.command}: {rec.error}", file=sys.stderr)
    return _exit_code([rec])


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
