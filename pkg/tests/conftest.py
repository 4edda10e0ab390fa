import pytest

_ACCEPTANCE: dict[str, tuple[str, str]] = {}


@pytest.fixture
def criterion(request):
    """Record one acceptance criterion's outcome for the terminal summary."""
    marker = request.node.get_closest_marker("criterion")
    number, title = marker.args
    _ACCEPTANCE[number] = (title, "FAIL")
    yield
    rep = getattr(request.node, "rep_call", None)
    if rep is not None and rep.passed:
        _ACCEPTANCE[number] = (title, "PASS")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        title, status = _ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number}: {status}  {title}")
