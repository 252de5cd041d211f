import sys
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import strategies as st

from coolsim.state import DiagonalState


def tanh_multiple(m, eps):
    """tanh(m * artanh(eps)) from the exact rational form, independent of math.tanh."""
    eps = Fraction(eps)
    a, b = (1 + eps) ** m, (1 - eps) ** m
    return float((a - b) / (a + b))


@st.composite
def diagonal_states(draw, min_n=1, max_n=4):
    n = draw(st.integers(min_n, max_n))
    weights = draw(st.lists(st.floats(0.0, 1.0), min_size=2 ** n, max_size=2 ** n))
    weights = np.asarray(weights) + 1e-3
    return DiagonalState(weights / weights.sum())


@st.composite
def reset_specs(draw, n):
    from coolsim.channels import StateResetSpec

    qubits = draw(st.permutations(range(1, n + 1)))
    m = draw(st.integers(1, n))
    labels = draw(st.lists(st.integers(0, 2 ** m - 1), min_size=2, max_size=2, unique=True))
    bits = [tuple((v >> (m - 1 - j)) & 1 for j in range(m)) for v in labels]
    p = draw(st.floats(0.01, 0.99))
    return StateResetSpec(tuple(qubits[:m]), bits[0], bits[1], p)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "REPORT", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
