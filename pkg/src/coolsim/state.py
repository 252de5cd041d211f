"""Diagonal n-qubit states and the bath model.

Populations are indexed big-endian: basis index i is the bit string
|q1 q2 ... qn> with qubit 1 as the most significant bit. Reshaping a
population vector to ``(2,) * n`` therefore puts qubit q on axis q - 1,
which is how every operation here addresses individual qubits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

NEG_TOL = 1e-15
SUM_TOL = 1e-12
# drift below this is left alone so permutations stay exact
RENORM_TOL = 1e-14


@dataclass(frozen=True)
class BathModel:
    """Heat bath of polarization ``eps_b`` in [0, 1)."""

    eps_b: float

    def __post_init__(self):
        eps = float(self.eps_b)
        if not math.isfinite(eps) or not 0.0 <= eps < 1.0:
            raise ValueError(f"bath polarization must lie in [0, 1), got {self.eps_b!r}")
        object.__setattr__(self, "eps_b", eps)

    @property
    def xi_b(self) -> float:
        return math.atanh(self.eps_b)

    def p_m(self, m: int) -> float:
        """Thermal weight of |0...0> relative to |0...0> + |1...1> on m qubits."""
        if m < 1:
            raise ValueError(f"m must be >= 1, got {m}")
        return 0.5 * (1.0 + math.tanh(m * self.xi_b))

    def qubit_populations(self) -> np.ndarray:
        return np.array([(1.0 + self.eps_b) / 2.0, (1.0 - self.eps_b) / 2.0])


def as_bath(bath: BathModel | float) -> BathModel:
    return bath if isinstance(bath, BathModel) else BathModel(bath)


@dataclass(frozen=True, eq=False)
class DiagonalState:
    """Normalized population vector of an n-qubit diagonal density matrix.

    Entries in [-1e-15, 0) are clamped to zero; anything more negative, or a
    total deviating from 1 by more than 1e-12, is rejected as a logic error.
    """

    populations: np.ndarray
    n: int = field(init=False)

    def __post_init__(self):
        pops = np.array(self.populations, dtype=float).ravel()
        size = pops.size
        if size < 2 or size & (size - 1):
            raise ValueError(f"population vector length must be 2**n with n >= 1, got {size}")
        if not np.all(np.isfinite(pops)):
            raise ValueError("populations must be finite")
        low = pops.min()
        if low < -NEG_TOL:
            raise ValueError(f"negative population {low!r} below tolerance")
        pops[pops < 0.0] = 0.0
        total = math.fsum(pops)
        if abs(total - 1.0) > SUM_TOL:
            raise ValueError(f"populations sum to {total!r}, not 1")
        if abs(total - 1.0) > RENORM_TOL:
            pops /= total
        pops.flags.writeable = False
        object.__setattr__(self, "populations", pops)
        object.__setattr__(self, "n", size.bit_length() - 1)

    def tensor_view(self) -> np.ndarray:
        """Populations reshaped so that qubit q lives on axis q - 1."""
        return self.populations.reshape((2,) * self.n)

    def polarizations(self) -> tuple[float, ...]:
        return tuple(polarization(self, q) for q in range(1, self.n + 1))

    def __repr__(self):
        return f"DiagonalState(n={self.n}, populations={self.populations.tolist()!r})"


def check_qubit(n: int, qubit: int) -> int:
    """Validate a 1-based qubit index and return its tensor axis."""
    if isinstance(qubit, bool) or int(qubit) != qubit:
        raise ValueError(f"qubit index must be an integer, got {qubit!r}")
    qubit = int(qubit)
    if not 1 <= qubit <= n:
        raise ValueError(f"qubit index {qubit} out of range for n={n}")
    return qubit - 1


def check_qubits(n: int, qubits: Iterable[int], allow_empty: bool = False) -> tuple[int, ...]:
    """Validate distinct 1-based indices; returns their 0-based axes in the given order."""
    axes = tuple(check_qubit(n, q) for q in qubits)
    if len(set(axes)) != len(axes):
        raise ValueError(f"repeated qubit index in {tuple(qubits)!r}")
    if not axes and not allow_empty:
        raise ValueError("qubit subset must be nonempty")
    return axes


def thermal_state(n: int, bath: BathModel | float) -> DiagonalState:
    bath = as_bath(bath)
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise ValueError(f"qubit count must be an integer >= 1, got {n!r}")
    single = bath.qubit_populations()
    pops = single
    for _ in range(int(n) - 1):
        pops = np.multiply.outer(pops, single).ravel()
    return DiagonalState(pops)


def product_state(polarizations: Sequence[float]) -> DiagonalState:
    """Product of single-qubit states with the given polarizations (qubit 1 first)."""
    if not polarizations:
        raise ValueError("need at least one qubit")
    pops = np.ones(1)
    for eps in polarizations:
        if not -1.0 <= eps <= 1.0:
            raise ValueError(f"polarization {eps!r} outside [-1, 1]")
        pops = np.multiply.outer(pops, [(1.0 + eps) / 2.0, (1.0 - eps) / 2.0]).ravel()
    return DiagonalState(pops)


def polarization(state: DiagonalState, qubit: int) -> float:
    """<Z> of one qubit: populations with that bit 0 minus those with it 1.

    Pairs differing only in the chosen bit are subtracted first and the
    differences summed with fsum, so small polarizations keep their digits.
    """
    axis = check_qubit(state.n, qubit)
    view = state.tensor_view()
    diff = np.take(view, 0, axis=axis) - np.take(view, 1, axis=axis)
    return math.fsum(np.ravel(diff))


def purity_from_polarization(eps: float) -> float:
    if not -1.0 <= eps <= 1.0:
        raise ValueError(f"polarization {eps!r} outside [-1, 1]")
    return (1.0 + eps * eps) / 2.0


def tensor(a: DiagonalState, b: DiagonalState) -> DiagonalState:
    """a (x) b with a on the high bits."""
    return DiagonalState(np.multiply.outer(a.populations, b.populations).ravel())


def trace_out(state: DiagonalState, qubit: int) -> DiagonalState:
    if state.n < 2:
        raise ValueError("cannot trace out the only qubit of a 1-qubit state")
    axis = check_qubit(state.n, qubit)
    return DiagonalState(state.tensor_view().sum(axis=axis).ravel())


def marginal(state: DiagonalState, qubits: Sequence[int]) -> DiagonalState:
    """Reduced state on ``qubits``, returned in the order given."""
    axes = check_qubits(state.n, qubits)
    others = tuple(ax for ax in range(state.n) if ax not in axes)
    reduced = state.tensor_view().sum(axis=others) if others else state.tensor_view()
    # sum() leaves the kept axes in ascending order; reorder to the request
    kept = sorted(axes)
    reduced = np.transpose(reduced, [kept.index(ax) for ax in axes])
    return DiagonalState(reduced.ravel())


def replace_qubits(state: DiagonalState, qubits: Sequence[int], sub: DiagonalState) -> DiagonalState:
    """Trace out ``qubits`` and put ``sub`` in their place (sub's qubit j -> qubits[j])."""
    axes = check_qubits(state.n, qubits)
    if sub.n != len(axes):
        raise ValueError(f"replacement has {sub.n} qubits, expected {len(axes)}")
    rest = state.tensor_view().sum(axis=axes) if axes else state.tensor_view()
    joined = np.multiply.outer(rest, sub.tensor_view())
    n_rest = state.n - len(axes)
    joined = np.moveaxis(joined, list(range(n_rest, state.n)), list(axes))
    return DiagonalState(joined.ravel())


def product_of_marginals(state: DiagonalState) -> DiagonalState:
    return product_state(state.polarizations())


def product_deviation(state: DiagonalState) -> float:
    """Largest entrywise gap between the state and the product of its marginals."""
    return float(np.max(np.abs(state.populations - product_of_marginals(state).populations)))


def shifted_scaled_diagonal(state: DiagonalState, bath: BathModel | float,
                            tol: float = 1e-9) -> tuple[float, ...]:
    """Per-qubit polarizations in units of eps_b, e.g. (3, 2, 1)."""
    bath = as_bath(bath)
    if bath.eps_b == 0.0:
        raise ValueError("shifted-and-scaled diagonal is undefined at eps_b = 0")
    gap = product_deviation(state)
    if gap > tol:
        raise ValueError(f"state is not a product state (deviation {gap:.3g} > {tol:.3g})")
    return tuple(eps / bath.eps_b for eps in state.polarizations())
