import pytest

_acceptance_lines: list[str] = []


@pytest.fixture
def report(request):
    """Record one PASS/FAIL line for an acceptance criterion."""
    lines = []

    def record(label: str):
        lines.append(label)

    yield record
    failed = getattr(request.node, "rep_call", None)
    status = "FAIL" if failed is None or failed.failed else "PASS"
    for label in lines:
        line = f"[{status}] {label}"
        _acceptance_lines.append(line)
        print(line)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)
