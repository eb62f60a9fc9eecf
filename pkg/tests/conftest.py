import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_RESULTS: dict[str, str] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(label): acceptance criterion with a one-line verdict")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    mark = item.get_closest_marker("acceptance")
    if mark is None:
        return
    report = outcome.get_result()
    label = mark.args[0]
    if report.failed or (report.when == "call" and report.skipped):
        _RESULTS[label] = "FAIL"
    elif report.when == "call":
        _RESULTS.setdefault(label, "PASS")


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(_RESULTS, key=lambda s: int(s.split()[0].split("-")[1])):
        terminalreporter.write_line(f"{_RESULTS[label]} {label}")
