import pytest

ACCEPTANCE = {}


@pytest.fixture
def verdict(request):
    """Record one acceptance line: ``verdict(ok, detail)``; the test then asserts ``ok``."""
    name = request.node.name

    def record(ok, detail):
        ACCEPTANCE[name] = (bool(ok), detail)
        print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[name]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
