import pytest
from hypothesis import HealthCheck, settings

from classmoments.fixtures import BUILTIN, load_fixture
from classmoments.quadfield import FormClassGroup, ideal_class_counts

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def frames():
    return {name: load_fixture(name) for name in BUILTIN}


@pytest.fixture(scope="session")
def c7c3(frames):
    return frames["c7c3"]


@pytest.fixture(scope="session")
def s4(frames):
    return frames["s4-deg12"]


@pytest.fixture(scope="session")
def table23():
    return ideal_class_counts(FormClassGroup(-23), 10**4)


# ---------------------------------------------------------------- acceptance reporting
# Tests marked ``criterion(n, title)`` are collected into one PASS/FAIL line per
# criterion, printed at the end of the run; a criterion passes only if every one
# of its tests passed (an xfail counts as a failure here).

_CRITERIA: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion n")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        n, title = marker.args
        entry = _CRITERIA.setdefault(n, {"title": title, "ok": True, "details": []})
        entry["ok"] &= report.outcome == "passed" and not hasattr(report, "wasxfail")
        entry["details"].extend(v for k, v in item.user_properties if k == "detail")
        if report.outcome != "passed" or hasattr(report, "wasxfail"):
            entry["details"].append(f"{item.name}: {'xfail' if hasattr(report, 'wasxfail') else report.outcome}")


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        e = _CRITERIA[n]
        line = f"criterion {n}: {'PASS' if e['ok'] else 'FAIL'}  {e['title']}"
        terminalreporter.write_line(line)
        for d in e["details"]:
            terminalreporter.write_line(f"    {d}")
