from __future__ import annotations

import os

import numpy as np
import pytest

from signednet.generators import make_rng

SEED = int(os.environ.get("SIGNEDNET_SEED", "20240917"))


@pytest.fixture
def rng() -> np.random.Generator:
    return make_rng(SEED)


def pytest_terminal_summary(terminalreporter):
    """One PASS/FAIL line per acceptance criterion, in criterion order."""
    rows = {}
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            nodeid = getattr(rep, "nodeid", "")
            if "test_acceptance.py::test_criterion_" not in nodeid or rep.when not in ("call", "setup"):
                continue
            name = nodeid.split("::")[-1]
            ok = outcome == "passed"
            rows[name] = rows.get(name, True) and ok
    if not rows:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(rows):
        terminalreporter.write_line(f"{'PASS' if rows[name] else 'FAIL'}  {name}")
