"""Print the acceptance verdicts recorded by ``test_acceptance.py``."""

_VERDICTS = []


def pytest_runtest_logreport(report):
    if report.when != "call" or "test_acceptance.py" not in report.nodeid:
        return
    for key, value in report.user_properties:
        if key == "verdict":
            _VERDICTS.append((report.nodeid.split("::")[-1], value))


def pytest_terminal_summary(terminalreporter):
    if not _VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, verdict in _VERDICTS:
        terminalreporter.write_line(f"{name}: {verdict}")
