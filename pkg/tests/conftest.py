import pytest

_ACCEPTANCE = []


@pytest.fixture(scope="session")
def acceptance_log():
    """Shared list of ``(number, passed, detail)`` acceptance outcomes."""
    return _ACCEPTANCE


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, passed, detail in sorted(_ACCEPTANCE):
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'} criterion {number:2d}: {detail}")
