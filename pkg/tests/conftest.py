from __future__ import annotations

import re

_CRITERIA: dict[int, tuple[str, bool]] = {}


def pytest_runtest_logreport(report):
    m = re.search(r"test_acceptance\.py::test_criterion_(\d+)_(\w+)", report.nodeid)
    if not m or report.when != "call" and report.passed:
        return
    k = int(m.group(1))
    title = m.group(2).replace("_", " ")
    ok = report.passed and _CRITERIA.get(k, (title, True))[1]
    _CRITERIA[k] = (title, ok)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_CRITERIA):
        title, ok = _CRITERIA[k]
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {title}")
