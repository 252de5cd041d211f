"""Permutation unitaries: bit flips and SORT compressions.

On diagonal states every unitary used by the protocols is a permutation of
the population vector, so none of them builds a matrix.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .state import DiagonalState, check_qubits


@dataclass(frozen=True, eq=False)
class PermutationSpec:
    """Basis permutation: population at index i moves to ``mapping[i]``."""

    mapping: np.ndarray

    def __post_init__(self):
        mapping = np.asarray(self.mapping, dtype=np.int64).ravel()
        if not np.array_equal(np.sort(mapping), np.arange(mapping.size)):
            raise ValueError("mapping is not a bijection on 0..N-1")
        mapping.flags.writeable = False
        object.__setattr__(self, "mapping", mapping)

    def apply(self, state: DiagonalState) -> DiagonalState:
        if self.mapping.size != state.populations.size:
            raise ValueError("permutation size does not match the state")
        out = np.empty_like(state.populations)
        out[self.mapping] = state.populations
        return DiagonalState(out)

    def inverse(self) -> "PermutationSpec":
        inv = np.empty_like(self.mapping)
        inv[self.mapping] = np.arange(self.mapping.size)
        return PermutationSpec(inv)


def flip_permutation(n: int, qubits: Sequence[int]) -> PermutationSpec:
    axes = check_qubits(n, qubits)
    mask = 0
    for ax in axes:
        mask |= 1 << (n - 1 - ax)
    return PermutationSpec(np.arange(2 ** n) ^ mask)


def flip_qubits(state: DiagonalState, qubits: Sequence[int]) -> DiagonalState:
    """Apply X to each listed qubit."""
    axes = check_qubits(state.n, qubits)
    return DiagonalState(np.flip(state.tensor_view(), axis=axes).ravel())


def sort_permutation(state: DiagonalState) -> PermutationSpec:
    """Permutation realising a descending stable sort (ties keep index order)."""
    order = np.argsort(-state.populations, kind="stable")
    mapping = np.empty_like(order)
    mapping[order] = np.arange(order.size)
    return PermutationSpec(mapping)


def sort_compression(state: DiagonalState) -> DiagonalState:
    """SORT: rearrange populations in non-increasing order."""
    order = np.argsort(-state.populations, kind="stable")
    return DiagonalState(state.populations[order])


def subset_sort(state: DiagonalState, qubits: Sequence[int]) -> DiagonalState:
    """SORT over the labels of ``qubits``, separately for every configuration
    of the remaining qubits (a controlled compression)."""
    axes = check_qubits(state.n, qubits)
    m = len(axes)
    view = np.moveaxis(state.tensor_view(), list(axes), list(range(m)))
    blocks = view.reshape(2 ** m, -1)
    order = np.argsort(-blocks, axis=0, kind="stable")
    blocks = np.take_along_axis(blocks, order, axis=0)
    view = blocks.reshape(view.shape)
    return DiagonalState(np.moveaxis(view, list(range(m)), list(axes)).ravel())
