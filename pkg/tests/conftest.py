import pytest


def pytest_addoption(parser):
    parser.addoption("--slow", action="store_true", default=False, help="run the larger instances")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--slow"):
        return
    skip = pytest.mark.skip(reason="needs --slow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


@pytest.fixture(scope="session")
def slow(request):
    return request.config.getoption("--slow")


ACCEPTANCE = []


@pytest.fixture
def accept(request):
    """Record one PASS/FAIL line for an acceptance criterion and return ok."""
    reporter = request.config.pluginmanager.getplugin("terminalreporter")

    def record(label, ok, detail=""):
        line = f"CRITERION {label}: {'PASS' if ok else 'FAIL'}"
        if detail:
            line += f" [{detail}]"
        ACCEPTANCE.append(line)
        if reporter is not None:
            reporter.write_line("")
            reporter.write_line(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
