"""Collects acceptance-criterion outcomes and prints one verdict line each."""
import pytest

_verdicts: dict[int, dict] = {}


def pytest_runtest_logreport(report):
    crit = getattr(report, "criterion", None)
    if crit is None:
        return
    number, text = crit
    entry = _verdicts.setdefault(number, {"text": text, "ok": True, "seen": False})
    if report.when == "call" or report.failed:
        entry["seen"] = True
        entry["ok"] = entry["ok"] and report.passed


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        outcome.get_result().criterion = (marker.args[0], marker.args[1])


def pytest_terminal_summary(terminalreporter):
    if not _verdicts:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_verdicts):
        v = _verdicts[number]
        verdict = "PASS" if v["ok"] and v["seen"] else "FAIL"
        terminalreporter.write_line(f"criterion {number}: {verdict}  {v['text']}")
