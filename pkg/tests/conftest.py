import pytest

ACCEPTANCE: dict = {}


@pytest.fixture
def record():
    """Store the outcome of one acceptance criterion for the end-of-run summary."""

    def _record(key: str, passed: bool, detail: str = ""):
        ACCEPTANCE[key] = (passed, detail)
        return passed

    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda k: int(k.split()[0])):
        passed, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] criterion {key}: {detail}")
