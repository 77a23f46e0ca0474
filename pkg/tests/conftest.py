import pytest

from rating_dynamics.fixtures import build_fixture, cities, write_fixture


@pytest.fixture(scope="session")
def city_dataset():
    cache = {}

    def get(name):
        if name not in cache:
            cache[name] = build_fixture(name)
        return cache[name]

    return get


@pytest.fixture(scope="session")
def fixture_dir(tmp_path_factory):
    """All city fixtures written once as JSON-lines files."""
    out = tmp_path_factory.mktemp("fixtures")
    for name in cities():
        write_fixture(name, out)
    return out


_CRITERIA = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py::" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    if not name.startswith("test_criterion_"):
        return
    failed = report.failed or (report.when == "call" and report.outcome != "passed")
    if report.when == "call" or failed:
        _CRITERIA[name] = _CRITERIA.get(name, True) and not failed


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_CRITERIA, key=lambda n: int(n.split("_")[2])):
        number = name.split("_")[2]
        label = name.split("_", 3)[3].replace("_", " ")
        status = "PASS" if _CRITERIA[name] else "FAIL"
        terminalreporter.write_line(f"criterion {number:>2} {status}  {label}")
