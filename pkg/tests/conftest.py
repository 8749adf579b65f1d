import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

# (criterion, passed, detail) rows filled in by the acceptance tests
_VERDICTS: list[tuple[str, bool, str]] = []


@pytest.fixture
def verdict():
    def record(name: str, passed: bool, detail: str) -> bool:
        _VERDICTS.append((name, bool(passed), detail))
        return bool(passed)

    return record


def pytest_terminal_summary(terminalreporter):
    if not _VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in sorted(_VERDICTS, key=lambda v: int(v[0].split()[0][1:])):
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {name}  ({detail})")
