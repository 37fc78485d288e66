import pytest

# criterion number -> [description, passed]; passed is None until a test for it runs
_ACCEPTANCE: dict[int, list] = {}


def pytest_collection_modifyitems(items):
    for item in items:
        marker = item.get_closest_marker("criterion")
        if marker is not None:
            number, text = marker.args
            _ACCEPTANCE.setdefault(number, [text, None])


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.skipped:
        return
    if report.when == "call" or report.failed:
        entry = _ACCEPTANCE[marker.args[0]]
        entry[1] = entry[1] is not False and report.passed


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    labels = {True: "PASS", False: "FAIL", None: "NOT RUN"}
    for number in sorted(_ACCEPTANCE):
        text, ok = _ACCEPTANCE[number]
        terminalreporter.write_line(f"[{labels[ok]}] criterion {number}: {text}")


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, text): acceptance criterion")
