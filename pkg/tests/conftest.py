import pytest

_RESULTS = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(k): acceptance criterion number")


@pytest.fixture
def record(request):
    """Attach a one-line detail string to the current acceptance test."""

    def _record(text):
        request.node.user_properties.append(("detail", text))

    return _record


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    k = marker.args[0]
    failed = rep.failed or (rep.when == "call" and rep.skipped)
    if rep.when == "call" or failed:
        detail = "; ".join(v for name, v in item.user_properties if name == "detail")
        prev = _RESULTS.get(k)
        if prev is None or prev[0] == "PASS":
            _RESULTS[k] = ("FAIL" if failed else "PASS", detail, item.name)


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_RESULTS):
        status, detail, name = _RESULTS[k]
        terminalreporter.write_line(f"criterion {k:2d} {status} {name} {detail}".rstrip())
