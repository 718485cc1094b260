"""Shared, expensive fixtures: calibration and validation runs over the declared corpora."""

import pytest

from sharplog import dyadic as dy
from sharplog import global_est as ge


@pytest.fixture(scope="session")
def ll_runs():
    cal = [dy.verify_ll_estimate(it.profile, it.alpha) for it in dy.corpus("calibration")]
    consts = dy.calibrate_ll(cal)
    items = dy.corpus("validation")
    val = [dy.verify_ll_estimate(it.profile, it.alpha, constants=consts) for it in items]
    return {"constants": consts, "calibration": dy.attach(cal, consts),
            "validation": list(zip(items, val))}


@pytest.fixture(scope="session")
def split_runs():
    cal = [ge.verify_low_high_split(it.profile, it.alpha) for it in dy.corpus("calibration")]
    consts = ge.calibrate_split(cal)
    items = dy.corpus("validation")
    val = [ge.verify_low_high_split(it.profile, it.alpha, constants=consts) for it in items]
    return {"constants": consts, "calibration": ge.attach_split(cal, consts),
            "validation": list(zip(items, val))}


ACCEPTANCE_LINES: dict[int, str] = {}


@pytest.fixture
def criterion():
    """Record one summary line per acceptance criterion; printed at the end of the run."""

    def record(k: int, checks: dict[str, bool], detail: str = "") -> bool:
        ok = all(checks.values())
        failed = [name for name, v in checks.items() if not v]
        line = f"criterion {k}: {'PASS' if ok else 'FAIL'}"
        if failed:
            line += f"  failed: {', '.join(failed)}"
        if detail:
            line += f"  ({detail})"
        ACCEPTANCE_LINES[k] = line
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])
