import pytest

from prowlnet import fixtures
from prowlnet.graph import NetworkInstance

_criteria: dict[int, tuple[str, str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion number and title")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    n, title = mark.args
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        detail = ""
        for name, value in item.user_properties:
            if name == "detail":
                detail = value
        status = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}[rep.outcome]
        prev = _criteria.get(n)
        # a criterion split over several tests passes only if all parts pass
        if prev is not None and prev[1] != "PASS":
            status = prev[1]
        details = "; ".join(d for d in (prev[2] if prev else "", detail) if d)
        _criteria[n] = (title, status, details)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        title, status, detail = _criteria[n]
        line = f"criterion {n:2d} [{status}] {title}"
        if detail:
            line += f" -- {detail}"
        terminalreporter.write_line(line)


@pytest.fixture
def path_abc():
    return NetworkInstance.from_edges([("a", "b"), ("b", "c")])


@pytest.fixture
def path5():
    return NetworkInstance.from_edges([("a", "b"), ("b", "c"), ("c", "d"), ("d", "e")])


@pytest.fixture
def star():
    return NetworkInstance.from_edges([(0, i) for i in range(1, 5)])


@pytest.fixture
def walk_graph():
    return fixtures.walk_fixture()


@pytest.fixture
def hub():
    return fixtures.hub_fixture()
