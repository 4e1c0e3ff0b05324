"""Prints one PASS/FAIL line per acceptance criterion after the run."""

import pytest

_RESULTS_KEY = pytest.StashKey[dict]()


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title, tolerance): acceptance criterion")
    config.stash[_RESULTS_KEY] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        number, title, tolerance = marker.args
        detail = dict(item.user_properties).get("detail", "")
        item.config.stash[_RESULTS_KEY][number] = (title, tolerance, report.passed, detail)


def pytest_terminal_summary(terminalreporter, config):
    results = config.stash.get(_RESULTS_KEY, {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        title, tolerance, passed, detail = results[number]
        line = f"{'PASS' if passed else 'FAIL'} criterion {number:>2}: {title} [tolerance: {tolerance}]"
        if detail:
            line += f" -- {detail}"
        terminalreporter.write_line(line)
