"""Non-unitary operations on diagonal states.

Fast paths act directly on population vectors. Each channel also has an
explicit column-stochastic transfer matrix, and state resets have a dense
Kraus implementation; those exist for cross-checking, not for speed.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.linalg import expm

from .state import (
    BathModel,
    DiagonalState,
    as_bath,
    check_qubit,
    check_qubits,
    replace_qubits,
)

log = logging.getLogger(__name__)

DENSE_MAX_QUBITS = 10
KRAUS_TOL = 1e-12


def p_m(bath: BathModel | float, m: int) -> float:
    """e^{m xi_b} / (2 cosh(m xi_b)), the |0..0> share after an m-qubit state reset."""
    return as_bath(bath).p_m(m)


def _bits(label, m: int | None = None) -> tuple[int, ...]:
    if isinstance(label, str):
        bits = tuple(int(c) for c in label)
    else:
        bits = tuple(int(b) for b in label)
    if any(b not in (0, 1) for b in bits):
        raise ValueError(f"basis label {label!r} is not a bit string")
    if m is not None and len(bits) != m:
        raise ValueError(f"basis label {label!r} must have {m} bits")
    return bits


def _label_index(bits: Sequence[int]) -> int:
    idx = 0
    for b in bits:
        idx = (idx << 1) | b
    return idx


@dataclass(frozen=True)
class StateResetSpec:
    """Re-equilibrate the populations of |s1> and |s2> on ``qubits`` to p : 1 - p.

    ``s1``/``s2`` are bit strings over the subset, first bit for ``qubits[0]``.
    The reset acts independently in every configuration of the other qubits.
    """

    qubits: tuple[int, ...]
    s1: tuple[int, ...]
    s2: tuple[int, ...]
    p: float

    def __post_init__(self):
        qubits = tuple(int(q) for q in self.qubits)
        if not qubits:
            raise ValueError("state reset needs at least one qubit")
        if len(set(qubits)) != len(qubits):
            raise ValueError(f"repeated qubit in {qubits}")
        s1 = _bits(self.s1, len(qubits))
        s2 = _bits(self.s2, len(qubits))
        if s1 == s2:
            raise ValueError("s1 and s2 must differ")
        p = float(self.p)
        if not 0.0 < p < 1.0:
            raise ValueError(f"reset probability must lie in (0, 1), got {self.p!r}")
        object.__setattr__(self, "qubits", qubits)
        object.__setattr__(self, "s1", s1)
        object.__setattr__(self, "s2", s2)
        object.__setattr__(self, "p", p)

    @classmethod
    def gamma(cls, qubits: Sequence[int], bath: BathModel | float) -> "StateResetSpec":
        """|0...0> <-> |1...1> reset on ``qubits`` at the bath ratio."""
        m = len(qubits)
        return cls(tuple(qubits), (0,) * m, (1,) * m, p_m(bath, m))

    def check(self, n: int) -> tuple[int, ...]:
        return check_qubits(n, self.qubits)


@dataclass(frozen=True)
class RateSet:
    """Two-qubit relaxation rates: g1 flips qubit 2, g1p flips qubit 1,
    g2 drives 00 <-> 11 and g2p drives 01 <-> 10."""

    g1: float = 0.0
    g1p: float = 0.0
    g2: float = 0.0
    g2p: float = 0.0

    def __post_init__(self):
        for name in ("g1", "g1p", "g2", "g2p"):
            val = float(getattr(self, name))
            if not math.isfinite(val) or val < 0.0:
                raise ValueError(f"rate {name} must be finite and >= 0, got {val!r}")
            object.__setattr__(self, name, val)

    @property
    def R1(self) -> float:
        return self.g2p + 2.0 * self.g1 + self.g2

    @property
    def R12(self) -> float:
        return self.g2 - self.g2p


# -- fast paths ---------------------------------------------------------------

def _reset_to(state: DiagonalState, qubit: int, single: np.ndarray) -> DiagonalState:
    return replace_qubits(state, (qubit,), DiagonalState(single))


def qubit_reset(state: DiagonalState, qubit: int, bath: BathModel | float) -> DiagonalState:
    """Swap one qubit for a fresh bath qubit (the usual Gamma_1 reset)."""
    check_qubit(state.n, qubit)
    return _reset_to(state, qubit, as_bath(bath).qubit_populations())


def cms(state: DiagonalState, qubit: int) -> DiagonalState:
    """Saturate one qubit to the completely mixed state."""
    check_qubit(state.n, qubit)
    return _reset_to(state, qubit, np.array([0.5, 0.5]))


def state_reset(state: DiagonalState, spec: StateResetSpec) -> DiagonalState:
    axes = spec.check(state.n)
    m = len(axes)
    view = np.moveaxis(state.tensor_view(), axes, range(m)).copy()
    a, b = view[spec.s1], view[spec.s2]
    total = a + b
    view[spec.s1] = total * spec.p
    view[spec.s2] = total * (1.0 - spec.p)
    return DiagonalState(np.moveaxis(view, range(m), axes).ravel())


def gamma_n(state: DiagonalState, qubits: Sequence[int], bath: BathModel | float) -> DiagonalState:
    """Correlated |0..0> <-> |1..1> reset on the given qubits."""
    return state_reset(state, StateResetSpec.gamma(tuple(qubits), bath))


# -- transfer matrices ----------------------------------------------------------

def _subset_labels(n: int, axes: Sequence[int]) -> tuple[np.ndarray, np.ndarray]:
    """For every basis index: its label on ``axes`` and the index with those bits cleared."""
    idx = np.arange(2 ** n)
    sub = np.zeros_like(idx)
    rest = idx.copy()
    for ax in axes:
        bit = (idx >> (n - 1 - ax)) & 1
        sub = (sub << 1) | bit
        rest &= ~(1 << (n - 1 - ax))
    return sub, rest


def state_reset_matrix(n: int, spec: StateResetSpec) -> np.ndarray:
    axes = spec.check(n)
    sub, rest = _subset_labels(n, axes)
    mat = np.eye(2 ** n)
    ia = np.flatnonzero(sub == _label_index(spec.s1))
    ib = np.flatnonzero(sub == _label_index(spec.s2))
    # both lists are ordered by index; pair them by spectator configuration
    ia = ia[np.argsort(rest[ia], kind="stable")]
    ib = ib[np.argsort(rest[ib], kind="stable")]
    mat[ia, ia] = spec.p
    mat[ia, ib] = spec.p
    mat[ib, ib] = 1.0 - spec.p
    mat[ib, ia] = 1.0 - spec.p
    return mat


def single_qubit_replace_matrix(n: int, qubit: int, single: Sequence[float]) -> np.ndarray:
    ax = check_qubit(n, qubit)
    block = np.outer(np.asarray(single, dtype=float), np.ones(2))
    return np.kron(np.kron(np.eye(2 ** ax), block), np.eye(2 ** (n - 1 - ax)))


def qubit_reset_matrix(n: int, qubit: int, bath: BathModel | float) -> np.ndarray:
    return single_qubit_replace_matrix(n, qubit, as_bath(bath).qubit_populations())


def cms_matrix(n: int, qubit: int) -> np.ndarray:
    return single_qubit_replace_matrix(n, qubit, (0.5, 0.5))


def apply_matrix(state: DiagonalState, mat: np.ndarray) -> DiagonalState:
    return DiagonalState(mat @ state.populations)


# -- dense Kraus oracle ---------------------------------------------------------

def local_kraus(spec: StateResetSpec, split_projectors: bool = False) -> list[np.ndarray]:
    """Kraus set on the subset alone: four reset operators plus the identity on
    every other basis label (s1 and s2 excluded, or the map is not trace
    preserving).

    By default that identity is one operator, so coherences among the
    untouched labels survive. ``split_projectors`` gives one projector per
    label instead, which agrees on populations but dephases those labels.
    """
    m = len(spec.qubits)
    dim = 2 ** m
    i1, i2 = _label_index(spec.s1), _label_index(spec.s2)

    def unit(row, col, amp):
        op = np.zeros((dim, dim), dtype=complex)
        op[row, col] = amp
        return op

    sp, sq = math.sqrt(spec.p), math.sqrt(1.0 - spec.p)
    ops = [unit(i1, i1, sp), unit(i1, i2, sp), unit(i2, i2, sq), unit(i2, i1, sq)]
    rest = [r for r in range(dim) if r not in (i1, i2)]
    if split_projectors:
        ops += [unit(r, r, 1.0) for r in rest]
    elif rest:
        keep = np.zeros((dim, dim), dtype=complex)
        keep[rest, rest] = 1.0
        ops.append(keep)
    return ops


def kraus_operators(n: int, spec: StateResetSpec,
                    split_projectors: bool = False) -> list[np.ndarray]:
    """Local Kraus set embedded with the identity on spectator qubits."""
    if n > DENSE_MAX_QUBITS:
        raise ValueError(f"dense Kraus oracle limited to n <= {DENSE_MAX_QUBITS}")
    axes = spec.check(n)
    sub, rest = _subset_labels(n, axes)
    same_spectators = rest[:, None] == rest[None, :]
    return [op[sub[:, None], sub[None, :]] * same_spectators for op in local_kraus(spec, split_projectors)]


def kraus_completeness_error(ops: Sequence[np.ndarray]) -> float:
    dim = ops[0].shape[0]
    total = sum(op.conj().T @ op for op in ops)
    return float(np.max(np.abs(total - np.eye(dim))))


def _check_density_matrix(rho: np.ndarray, atol: float) -> int:
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError("density matrix must be square")
    dim = rho.shape[0]
    n = dim.bit_length() - 1
    if dim < 2 or dim != 2 ** n:
        raise ValueError(f"density matrix dimension {dim} is not 2**n")
    if np.max(np.abs(rho - rho.conj().T)) > atol:
        raise ValueError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1.0) > atol:
        raise ValueError("density matrix does not have unit trace")
    if np.linalg.eigvalsh((rho + rho.conj().T) / 2).min() < -atol:
        raise ValueError("density matrix is not positive semidefinite")
    return n


def apply_kraus_dense(rho: np.ndarray, spec: StateResetSpec,
                      ops: Sequence[np.ndarray] | None = None,
                      atol: float = KRAUS_TOL) -> np.ndarray:
    """sum_i A_i rho A_i^dagger with the explicit Kraus set of ``spec``.

    ``ops`` overrides the Kraus set (used to feed deliberately broken sets to
    the completeness check).
    """
    n = _check_density_matrix(rho, atol)
    if n > DENSE_MAX_QUBITS:
        raise ValueError(f"dense Kraus oracle limited to n <= {DENSE_MAX_QUBITS}")
    if ops is None:
        ops = kraus_operators(n, spec)
    err = kraus_completeness_error(ops)
    if err > atol:
        raise ValueError(f"Kraus set is not complete: max |sum A^dag A - I| = {err:.3g}")
    rho = np.asarray(rho, dtype=complex)
    return sum(op @ rho @ op.conj().T for op in ops)


# -- two-qubit rate-equation oracle ---------------------------------------------

# (edge endpoints, rate attribute, energy change in units of xi going a -> b)
_EDGES = (
    ((0, 1), "g1", -2), ((2, 3), "g1", -2),
    ((0, 2), "g1p", -2), ((1, 3), "g1p", -2),
    ((0, 3), "g2", -4),
    ((1, 2), "g2p", 0),
)


def rate_matrix(rates: RateSet, bath: BathModel | float) -> np.ndarray:
    """Generator Q (dp/dt = Q p) on (N00, N01, N10, N11).

    Every pictured transition relaxes toward the thermal ratio
    N_b / N_a = e^{delta xi_b}, with total exchange rate equal to its Gamma.
    """
    xi = as_bath(bath).xi_b
    q = np.zeros((4, 4))
    for (a, b), name, delta in _EDGES:
        g = getattr(rates, name)
        if g == 0.0:
            continue
        # k_ab / k_ba = e^{delta xi}, k_ab + k_ba = g
        k_ab = g / (1.0 + math.exp(-delta * xi))
        k_ba = g - k_ab
        q[b, a] += k_ab
        q[a, a] -= k_ab
        q[a, b] += k_ba
        q[b, b] -= k_ba
    return q


def rate_matrix_evolve(pops: Sequence[float], rates: RateSet, bath: BathModel | float,
                       t: float) -> np.ndarray:
    pops = DiagonalState(pops).populations
    if pops.size != 4:
        raise ValueError("rate-equation oracle is defined for two qubits only")
    if not t >= 0.0:
        raise ValueError(f"time must be >= 0, got {t!r}")
    if t == 0.0:
        return pops.copy()
    return expm(rate_matrix(rates, bath) * t) @ pops


def solomon_steady_state(rates: RateSet, z1_eq: float, z2_eq: float) -> float:
    """<Z1> at steady state with qubit 2 saturated."""
    if rates.R1 <= 0.0:
        raise ValueError("R1 must be positive")
    return z1_eq + rates.R12 / rates.R1 * z2_eq
