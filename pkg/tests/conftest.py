import pytest

_VERDICTS = pytest.StashKey[list]()


@pytest.fixture
def verdict(request, capsys):
    """Record and print one PASS/FAIL line; returns the verdict."""

    def record(number: int, label: str, passed: bool, detail: str) -> bool:
        line = f"[{number:2d}] {'PASS' if passed else 'FAIL'}  {label}: {detail}"
        request.config.stash.setdefault(_VERDICTS, []).append((number, line))
        with capsys.disabled():
            print("\n" + line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_VERDICTS, None)
    if lines:
        terminalreporter.section("acceptance")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
