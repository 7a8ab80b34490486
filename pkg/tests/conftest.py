from __future__ import annotations

import pytest

from skewrec import CellSpace, Perm, SimplePartition, simple_cocycle

_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance_log():
    """Append one ``PASS``/``FAIL`` line per acceptance criterion for the terminal summary."""
    return _ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def four():
    """The 4-cell simple cocycle: S = (0 1 2 3), B_1 = {0, 1} with Id, B_2 = {2, 3} with swap."""
    X = CellSpace(4)
    S = Perm.from_cycles(X, [(0, 1, 2, 3)])
    part = SimplePartition(((0, 1), (2, 3)), (Perm.identity(X), Perm.transposition(X, 0, 1)))
    return S, part, simple_cocycle(S, part)
