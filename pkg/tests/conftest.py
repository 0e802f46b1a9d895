import numpy as np
import pytest

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
I2 = np.eye(2, dtype=complex)
PINCHING = np.diag([1.0, 0.0, 0.0, 1.0]).astype(complex)

# one line per acceptance criterion, filled in by test_acceptance and printed at the end
ACCEPTANCE_LINES: list[str] = []


def superop_by_action(fn, d):
    """Oracle superoperator: column j is the column-stacked image of the j-th basis matrix."""
    cols = []
    for j in range(d * d):
        E = np.zeros(d * d, dtype=complex)
        E[j] = 1.0
        cols.append(fn(E.reshape(d, d, order="F")).reshape(-1, order="F"))
    return np.array(cols).T


def dephasing(gamma):
    return superop_by_action(lambda X: gamma * (SZ @ X @ SZ - X), 2)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
