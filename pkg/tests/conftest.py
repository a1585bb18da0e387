from __future__ import annotations

import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=200, deadline=None)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_interval(rng):
    a, b = np.sort(rng.uniform(0, 1, 2))
    return float(a), float(b)


_ACCEPTANCE: dict[str, tuple[str, str]] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        props = dict(report.user_properties)
        crit = props.get("criterion", report.nodeid.split("::")[-1])
        _ACCEPTANCE[crit] = ("PASS" if report.passed else "FAIL", props.get("detail", ""))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for crit in sorted(_ACCEPTANCE, key=lambda c: int(c[1:]) if c[1:].isdigit() else 99):
        status, detail = _ACCEPTANCE[crit]
        terminalreporter.write_line(f"{crit}: {status}  {detail}")
