import os
from pathlib import Path

import pytest

_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def criterion():
    """Record one PASS/FAIL line per acceptance criterion for the summary."""

    def record(label: str, ok: bool | None, detail: str = "") -> bool | None:
        status = "SKIP" if ok is None else ("PASS" if ok else "FAIL")
        _ACCEPTANCE_LINES.append(f"[{status}] {label}" + (f" -- {detail}" if detail else ""))
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def uefa_csv() -> Path | None:
    """Path to the user-supplied UEFA first-goal data, if present."""
    candidates = [os.environ.get("EXPCOPULA_UEFA_CSV"), Path(__file__).parent / "data" / "uefa.csv"]
    for cand in candidates:
        if cand and Path(cand).is_file():
            return Path(cand)
    return None
