import pytest

VERDICTS: list = []


@pytest.fixture
def verdict():
    """Record one acceptance line; printed again in the terminal summary."""
    def record(number: int, title: str, checks: list):
        failed = [c for c in checks if not c[1]]
        status = "PASS" if checks and not failed else "FAIL"
        line = f"criterion {number:2d} [{status}] {title} ({len(checks) - len(failed)}/{len(checks)} checks)"
        VERDICTS.append((number, line))
        print(line)
        assert checks, "no checks were run"
        assert not failed, [name for name, _ in failed][:10]
    return record


def pytest_terminal_summary(terminalreporter):
    if VERDICTS:
        terminalreporter.section("acceptance")
        for _, line in sorted(VERDICTS):
            terminalreporter.write_line(line)
