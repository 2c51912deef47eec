from __future__ import annotations

import sys
import time

_START = time.perf_counter()


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    total = time.perf_counter() - _START
    terminalreporter.section("acceptance criteria")
    for num, name, _, _ in mod.CRITERIA:
        if num in mod.RESULTS:
            terminalreporter.write_line(mod.summary_line(num, name))
    verdict = "PASS" if total < mod.SUITE_BUDGET else "FAIL"
    terminalreporter.write_line(f"{verdict} full suite: {total:.2f}s, budget {mod.SUITE_BUDGET:.0f}s")
