from __future__ import annotations

import sys

import pytest

from motivic_ext.cobar import RealCobar, Window, ext_chart_direct, ext_chart_real
from motivic_ext.coefficients import builtin

SMALL = Window(s_max=6, t_min=0, t_max=10, w_min=-2, w_max=8)
SMALL_BUDGET = 30_000


@pytest.fixture(scope="session")
def real_small():
    eng = RealCobar(SMALL, SMALL_BUDGET)
    return eng, ext_chart_real(SMALL, SMALL_BUDGET, engine=eng)


@pytest.fixture(scope="session")
def complex_small():
    return ext_chart_direct(builtin("C"), SMALL, SMALL_BUDGET)


@pytest.fixture(scope="session")
def profiles():
    return {name: builtin(name) for name in ("C", "R", "F_3", "F_5", "F_7", "rho-nil-2", "Q", "F_7@3", "F_2@5")}


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    if module is None or not module.RESULTS:
        return
    RESULTS = module.RESULTS
    terminalreporter.section("acceptance criteria")
    for n in sorted(RESULTS):
        ok, detail = RESULTS[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
