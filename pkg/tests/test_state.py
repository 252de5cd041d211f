import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from coolsim.state import (
    BathModel,
    DiagonalState,
    marginal,
    polarization,
    product_state,
    purity_from_polarization,
    replace_qubits,
    shifted_scaled_diagonal,
    tensor,
    thermal_state,
    trace_out,
)

from conftest import diagonal_states


@pytest.mark.parametrize("n, eps, expected", [
    (1, 0.5, [0.75, 0.25]),
    (2, 0.2, [0.36, 0.24, 0.24, 0.16]),
    (2, 0.0, [0.25] * 4),
])
def test_thermal_state(n, eps, expected):
    np.testing.assert_allclose(thermal_state(n, eps).populations, expected, atol=1e-15)


def test_thermal_state_rejects_bad_input():
    with pytest.raises(ValueError):
        thermal_state(0, 0.1)
    with pytest.raises(ValueError):
        thermal_state(2, 1.0)
    with pytest.raises(ValueError):
        thermal_state(2, -0.1)


def test_bath_model():
    bath = BathModel(0.3)
    assert math.tanh(bath.xi_b) == pytest.approx(0.3, abs=1e-16)
    ps = [bath.p_m(m) for m in range(1, 12)]
    assert all(0.5 <= p < 1 for p in ps)
    assert ps == sorted(ps)
    assert BathModel(0.0).p_m(5) == 0.5


def test_construction_clamps_and_rejects():
    st_ = DiagonalState([0.5, 0.5, -1e-16, 0.0])
    assert st_.populations[2] == 0.0
    with pytest.raises(ValueError):
        DiagonalState([0.6, 0.5, -1e-10, 0.0])
    with pytest.raises(ValueError):
        DiagonalState([0.5, 0.5 + 1e-9])
    with pytest.raises(ValueError):
        DiagonalState([0.2, 0.3, 0.5])
    assert DiagonalState([0.125] * 8).n == 3


def test_populations_are_read_only():
    state = thermal_state(2, 0.2)
    with pytest.raises(ValueError):
        state.populations[0] = 1.0


@pytest.mark.parametrize("pops, qubit, expected", [
    (thermal_state(2, 0.2).populations, 1, 0.2),
    ([0.25] * 4, 2, 0.0),
    ([0.5, 0, 0, 0.5], 1, 0.0),
    ([0.1, 0.2, 0.3, 0.4], 2, -0.2),
])
def test_polarization(pops, qubit, expected):
    assert polarization(DiagonalState(pops), qubit) == pytest.approx(expected, abs=1e-15)


def test_polarization_index_errors():
    with pytest.raises(ValueError):
        polarization(thermal_state(2, 0.1), 3)
    with pytest.raises(ValueError):
        polarization(thermal_state(2, 0.1), 0)


def test_polarization_keeps_digits_at_small_bias():
    eps = 1e-9
    state = thermal_state(6, eps)
    for q in range(1, 7):
        assert polarization(state, q) == pytest.approx(eps, rel=1e-6)


@pytest.mark.parametrize("eps, expected", [(0.0, 0.5), (1.0, 1.0), (0.2, 0.52)])
def test_purity(eps, expected):
    assert purity_from_polarization(eps) == pytest.approx(expected, abs=1e-15)
    assert math.sqrt(2 * purity_from_polarization(eps) - 1) == pytest.approx(eps, abs=1e-12)


def test_purity_rejects_out_of_range():
    with pytest.raises(ValueError):
        purity_from_polarization(1.5)


def test_tensor_examples():
    np.testing.assert_array_equal(
        tensor(DiagonalState([1, 0]), DiagonalState([0.5, 0.5])).populations, [0.5, 0.5, 0, 0])
    np.testing.assert_allclose(
        tensor(DiagonalState([0.6, 0.4]), DiagonalState([1, 0])).populations, [0.6, 0, 0.4, 0])
    np.testing.assert_allclose(
        tensor(thermal_state(1, 0.3), thermal_state(1, 0.3)).populations,
        thermal_state(2, 0.3).populations, atol=1e-16)


@pytest.mark.parametrize("pops, qubit, expected", [
    ([0.36, 0.24, 0.24, 0.16], 2, [0.6, 0.4]),
    ([0.36, 0.24, 0.24, 0.16], 1, [0.6, 0.4]),
    ([0.5, 0, 0, 0.5], 2, [0.5, 0.5]),
])
def test_trace_out(pops, qubit, expected):
    np.testing.assert_allclose(trace_out(DiagonalState(pops), qubit).populations, expected,
                               atol=1e-15)


def test_trace_out_errors():
    with pytest.raises(ValueError):
        trace_out(DiagonalState([0.5, 0.5]), 1)
    with pytest.raises(ValueError):
        trace_out(thermal_state(2, 0.1), 3)


def test_marginal_order_and_replace():
    state = product_state([0.1, 0.2, 0.3])
    assert marginal(state, [3, 1]).polarizations() == pytest.approx((0.3, 0.1))
    swapped = replace_qubits(state, [2], product_state([-0.5]))
    assert swapped.polarizations() == pytest.approx((0.1, -0.5, 0.3))
    moved = replace_qubits(state, [3, 1], product_state([0.7, 0.9]))
    assert moved.polarizations() == pytest.approx((0.9, 0.2, 0.7))


@given(diagonal_states(max_n=3), diagonal_states(max_n=3))
def test_polarization_of_tensor_factors(a, b):
    joint = tensor(a, b)
    for q in range(1, a.n + 1):
        assert polarization(joint, q) == pytest.approx(polarization(a, q), abs=1e-15)
    for q in range(1, b.n + 1):
        assert polarization(joint, a.n + q) == pytest.approx(polarization(b, q), abs=1e-15)


@given(diagonal_states(max_n=3), diagonal_states(max_n=2), st.data())
def test_trace_out_inverts_tensor(a, b, data):
    joint = tensor(a, b)
    for _ in range(b.n):
        q = data.draw(st.integers(a.n + 1, joint.n))
        joint = trace_out(joint, q)
    np.testing.assert_allclose(joint.populations, a.populations, atol=1e-15, rtol=0)


def test_shifted_scaled_diagonal():
    assert shifted_scaled_diagonal(thermal_state(3, 0.01), 0.01) == pytest.approx((1, 1, 1))
    assert shifted_scaled_diagonal(product_state([0.02, 0.01]), 0.01) == pytest.approx((2, 1))
    with pytest.raises(ValueError):
        shifted_scaled_diagonal(thermal_state(2, 0.0), 0.0)
    with pytest.raises(ValueError):
        shifted_scaled_diagonal(DiagonalState([0.5, 0, 0, 0.5]), 0.1)
