import pytest

ACCEPTANCE_RESULTS = []


@pytest.fixture
def record_acceptance():
    return ACCEPTANCE_RESULTS.append


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    from spinphase.acceptance import format_table

    terminalreporter.section("acceptance criteria")
    for line in format_table(sorted(ACCEPTANCE_RESULTS, key=lambda r: r.number)).splitlines():
        terminalreporter.write_line(line)
