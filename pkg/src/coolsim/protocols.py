"""Cooling protocols as round generators, plus a fixed-point driver.

Every protocol is a generator yielding the register state at round
boundaries, starting with round 0 (the thermal state). ``run_*`` functions
take a fixed number of rounds; :func:`fixed_point` iterates until the
per-qubit polarizations stop moving.

Nested preparations (the Alg_{n-1} step of state-reset cooling and the
sub-chains of NOE-based cooling) are simulated in one of two ways,
selected by ``InnerPolicy.reuse_preparation``:

* ``False``: the sub-procedure is rerun on the live register every time,
  acting blockwise on each configuration of the other qubits, until its
  head qubit is within ``delta_inner`` (relative) of its target.
* ``True`` (default): the sub-procedure is run once to the same tolerance
  on a fresh thermal sub-register, and its terminal state is swapped in
  for the sub-chain at every later call. Converged preparations forget
  their input and leave the sub-chain uncorrelated with the rest, so both
  routes agree to within the inner tolerance; the nested route costs a
  factor of ~100 per level and is only practical for small n.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator

from .analytics import predict_noe_asymptote, predict_sr_asymptote
from .channels import cms, gamma_n, qubit_reset
from .state import (
    BathModel,
    DiagonalState,
    as_bath,
    polarization,
    replace_qubits,
    thermal_state,
)
from .unitaries import flip_qubits, sort_compression, subset_sort

log = logging.getLogger(__name__)

KINDS = ("noe", "gnoe", "srg2", "srg3", "srgn", "ppa", "noe_hbac")
COMPRESSION_MODES = ("subset_three_bit_sort", "full_sort")
NOE_ORDERS = ("cms_first", "gamma_first")
MAX_QUBITS = 16


class ConvergenceError(RuntimeError):
    """Raised by :func:`fixed_point` when ``max_rounds`` is exhausted."""

    def __init__(self, message: str, eps: float, rounds_used: int):
        super().__init__(message)
        self.eps = eps
        self.rounds_used = rounds_used


@dataclass(frozen=True)
class InnerPolicy:
    delta_inner: float = 1e-8
    max_inner: int = 200
    reuse_preparation: bool = True

    def __post_init__(self):
        if not self.delta_inner > 0:
            raise ValueError(f"delta_inner must be > 0, got {self.delta_inner!r}")
        if int(self.max_inner) != self.max_inner or self.max_inner < 1:
            raise ValueError(f"max_inner must be an integer >= 1, got {self.max_inner!r}")


@dataclass(frozen=True)
class ProtocolSpec:
    kind: str
    n: int
    rounds: int = 0
    inner: InnerPolicy = field(default_factory=InnerPolicy)
    compression_mode: str = "subset_three_bit_sort"
    noe_order: str = "cms_first"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown protocol {self.kind!r}; choose from {', '.join(KINDS)}")
        n = self.n
        if isinstance(n, bool) or int(n) != n:
            raise ValueError(f"n must be an integer, got {n!r}")
        if self.kind in ("noe", "srg2") and n != 2:
            raise ValueError(f"protocol {self.kind} requires n = 2, got {n}")
        if self.kind == "srg3" and n != 3:
            raise ValueError(f"protocol srg3 requires n = 3, got {n}")
        if not 2 <= n <= MAX_QUBITS:
            raise ValueError(f"protocol {self.kind} requires 2 <= n <= {MAX_QUBITS}, got {n}")
        if int(self.rounds) != self.rounds or self.rounds < 0:
            raise ValueError(f"rounds must be an integer >= 0, got {self.rounds!r}")
        if self.compression_mode not in COMPRESSION_MODES:
            raise ValueError(f"unknown compression mode {self.compression_mode!r}")
        if self.noe_order not in NOE_ORDERS:
            raise ValueError(f"unknown NOE ordering {self.noe_order!r}")


@dataclass(frozen=True)
class RoundSnapshot:
    k: int
    polarizations: tuple[float, ...]


@dataclass(frozen=True, eq=False)
class CoolingTrace:
    protocol: str
    rounds: tuple[RoundSnapshot, ...]
    terminal_state: DiagonalState | None

    def target(self) -> list[float]:
        """Qubit-1 polarization per round."""
        return [snap.polarizations[0] for snap in self.rounds]


def snapshot(k: int, state: DiagonalState) -> RoundSnapshot:
    return RoundSnapshot(k, state.polarizations())


def _converged(value: float, target: float, delta: float) -> bool:
    return abs(value - target) <= delta * abs(target)


def _exhausted(what: str, policy: InnerPolicy):
    log.warning("%s did not reach delta_inner=%g within %d rounds",
                what, policy.delta_inner, policy.max_inner)


# -- state-reset cooling ------------------------------------------------------------

def _sr_prepare(state: DiagonalState, chain: tuple[int, ...], bath: BathModel,
                policy: InnerPolicy) -> DiagonalState:
    """Cool chain[0] to tanh((2^m - 1) xi_b) with the m-qubit state-reset algorithm."""
    if len(chain) == 1:
        return qubit_reset(state, chain[0], bath)
    if policy.reuse_preparation:
        return replace_qubits(state, chain, _sr_prepared(len(chain), bath, policy))
    return _sr_prepare_nested(state, chain, bath, policy)


def _sr_round(state, chain, bath, policy):
    tail = chain[1:]
    state = flip_qubits(state, tail)
    state = gamma_n(state, chain, bath)
    return _sr_prepare(state, tail, bath, policy)


def _sr_prepare_nested(state, chain, bath, policy):
    head = chain[0]
    target = predict_sr_asymptote(len(chain), bath.eps_b)
    state = _sr_prepare(state, chain[1:], bath, policy)
    done = 0
    while not _converged(polarization(state, head), target, policy.delta_inner):
        if done == policy.max_inner:
            _exhausted(f"state-reset preparation on qubits {chain}", policy)
            break
        state = _sr_round(state, chain, bath, policy)
        done += 1
    return state


@lru_cache(maxsize=None)
def _sr_prepared(m: int, bath: BathModel, policy: InnerPolicy) -> DiagonalState:
    return _sr_prepare_nested(thermal_state(m, bath), tuple(range(1, m + 1)), bath, policy)


def sr_rounds(n: int, bath: BathModel | float,
              policy: InnerPolicy = InnerPolicy()) -> Iterator[DiagonalState]:
    """State-reset cooling on n qubits.

    A round flips qubits 2..n, applies Gamma_n to the whole register and then
    re-prepares qubits 2..n with the (n-1)-qubit algorithm (a plain qubit
    reset when n = 2). Qubits 2..n are prepared once before the first round,
    which for n = 2 is a no-op on the thermal start.
    """
    bath = as_bath(bath)
    chain = tuple(range(1, n + 1))
    state = thermal_state(n, bath)
    yield state
    state = _sr_prepare(state, chain[1:], bath, policy)
    while True:
        state = _sr_round(state, chain, bath, policy)
        yield state


# -- NOE family ---------------------------------------------------------------------

def noe_rounds(bath: BathModel | float, order: str = "cms_first") -> Iterator[DiagonalState]:
    """Saturate qubit 2 and cross-relax the pair, repeatedly."""
    bath = as_bath(bath)
    state = thermal_state(2, bath)
    yield state
    while True:
        if order == "cms_first":
            state = gamma_n(cms(state, 2), (1, 2), bath)
        else:
            state = cms(gamma_n(state, (1, 2), bath), 2)
        yield state


def generalized_noe_rounds(n: int, bath: BathModel | float) -> Iterator[DiagonalState]:
    bath = as_bath(bath)
    state = thermal_state(n, bath)
    everything = tuple(range(1, n + 1))
    yield state
    while True:
        for q in everything[1:]:
            state = cms(state, q)
        state = gamma_n(state, everything, bath)
        yield state


def ppa_rounds(n: int, bath: BathModel | float) -> Iterator[DiagonalState]:
    """SORT the register, then re-thermalize the last qubit."""
    bath = as_bath(bath)
    state = thermal_state(n, bath)
    yield state
    while True:
        state = qubit_reset(sort_compression(state), n, bath)
        yield state


def _two_noe(state, pair, bath, policy):
    """NOE on the pair until its head reaches tanh(2 xi_b), then reset the partner."""
    head, partner = pair
    target = predict_noe_asymptote(bath.eps_b)
    done = 0
    while not _converged(polarization(state, head), target, policy.delta_inner):
        if done == policy.max_inner:
            _exhausted(f"NOE on qubits {pair}", policy)
            break
        state = gamma_n(cms(state, partner), pair, bath)
        done += 1
    return qubit_reset(state, partner, bath)


def _compression_window(chain, mode):
    return chain[:3] if mode == "subset_three_bit_sort" else chain


def _noe_prepare(state, chain, bath, policy, mode):
    if len(chain) == 1:
        return qubit_reset(state, chain[0], bath)
    if policy.reuse_preparation:
        return replace_qubits(state, chain, _noe_prepared(len(chain), bath, policy, mode))
    return _noe_prepare_nested(state, chain, bath, policy, mode)


def _noe_prepare_nested(state, chain, bath, policy, mode):
    if len(chain) == 2:
        return _two_noe(state, chain, bath, policy)
    head, tail = chain[0], chain[1:]
    window = _compression_window(chain, mode)
    state = _noe_prepare(state, tail, bath, policy, mode)
    prev = polarization(state, head)
    for _ in range(policy.max_inner):
        state = _noe_prepare(subset_sort(state, window), tail, bath, policy, mode)
        cur = polarization(state, head)
        if _converged(prev, cur, policy.delta_inner):
            break
        prev = cur
    else:
        _exhausted(f"NOE-based preparation on qubits {chain}", policy)
    return state


@lru_cache(maxsize=None)
def _noe_prepared(m: int, bath: BathModel, policy: InnerPolicy, mode: str) -> DiagonalState:
    return _noe_prepare_nested(thermal_state(m, bath), tuple(range(1, m + 1)), bath, policy, mode)


def noe_hbac_rounds(n: int, bath: BathModel | float, mode: str = "subset_three_bit_sort",
                    policy: InnerPolicy = InnerPolicy()) -> Iterator[DiagonalState]:
    """NOE-based cooling using only pair cross-relaxation plus compressions.

    n = 2: NOE rounds, each closed by a reset of qubit 2 (the next saturation
    erases it again, so the target follows the plain NOE trajectory).
    n >= 3: qubits 2..n are cooled by the same procedure one level down; a
    round compresses the top window (qubits 1-3, or the whole register for
    ``full_sort``) and re-prepares qubits 2..n.
    """
    bath = as_bath(bath)
    state = thermal_state(n, bath)
    yield state
    if n == 2:
        while True:
            state = qubit_reset(gamma_n(cms(state, 2), (1, 2), bath), 2, bath)
            yield state
    chain = tuple(range(1, n + 1))
    window = _compression_window(chain, mode)
    state = _noe_prepare(state, chain[1:], bath, policy, mode)
    while True:
        state = _noe_prepare(subset_sort(state, window), chain[1:], bath, policy, mode)
        yield state


# -- dispatch ------------------------------------------------------------------------

def round_states(spec: ProtocolSpec, bath: BathModel | float) -> Iterator[DiagonalState]:
    bath = as_bath(bath)
    kind, n = spec.kind, spec.n
    if kind == "noe":
        return noe_rounds(bath, spec.noe_order)
    if kind == "gnoe":
        return generalized_noe_rounds(n, bath)
    if kind in ("srg2", "srg3", "srgn"):
        return sr_rounds(n, bath, spec.inner)
    if kind == "ppa":
        return ppa_rounds(n, bath)
    return noe_hbac_rounds(n, bath, spec.compression_mode, spec.inner)


def run(spec: ProtocolSpec, bath: BathModel | float) -> CoolingTrace:
    snaps = []
    state = None
    for k, state in enumerate(round_states(spec, bath)):
        snaps.append(snapshot(k, state))
        if k == spec.rounds:
            break
    return CoolingTrace(spec.kind, tuple(snaps), state)


def run_noe(bath, rounds: int, order: str = "cms_first") -> CoolingTrace:
    return run(ProtocolSpec("noe", 2, rounds, noe_order=order), bath)


def run_generalized_noe(n: int, bath, rounds: int) -> CoolingTrace:
    return run(ProtocolSpec("gnoe", n, rounds), bath)


def run_sr_gamma2(bath, rounds: int) -> CoolingTrace:
    return run(ProtocolSpec("srg2", 2, rounds), bath)


def run_sr_gamma3(bath, rounds: int, inner: InnerPolicy = InnerPolicy()) -> CoolingTrace:
    return run(ProtocolSpec("srg3", 3, rounds, inner), bath)


def run_sr_gamma_n(n: int, bath, rounds: int, inner: InnerPolicy = InnerPolicy()) -> CoolingTrace:
    return run(ProtocolSpec("srgn", n, rounds, inner), bath)


def run_ppa(n: int, bath, rounds: int) -> CoolingTrace:
    return run(ProtocolSpec("ppa", n, rounds), bath)


def run_noe_based_hbac(n: int, bath, rounds: int, compression_mode: str = "subset_three_bit_sort",
                       inner: InnerPolicy = InnerPolicy()) -> CoolingTrace:
    return run(ProtocolSpec("noe_hbac", n, rounds, inner, compression_mode), bath)


@dataclass(frozen=True)
class FixedPoint:
    eps_inf: float
    rounds_used: int
    state: DiagonalState


def fixed_point(spec: ProtocolSpec, bath: BathModel | float, tol: float = 1e-12,
                max_rounds: int = 100_000) -> FixedPoint:
    """Iterate rounds until no qubit's polarization moves by ``tol`` or more.

    Returns the target polarization and the number of rounds taken; raises
    ConvergenceError if ``max_rounds`` pass first.
    """
    if not tol > 0:
        raise ValueError(f"tol must be > 0, got {tol!r}")
    states = round_states(spec, bath)
    prev = next(states).polarizations()
    for k in range(1, max_rounds + 1):
        state = next(states)
        cur = state.polarizations()
        if max(abs(a - b) for a, b in zip(cur, prev)) < tol:
            return FixedPoint(cur[0], k, state)
        prev = cur
    raise ConvergenceError(
        f"{spec.kind} (n={spec.n}) did not converge to tol={tol:g} in {max_rounds} rounds",
        prev[0], max_rounds)


def clear_preparation_cache():
    _sr_prepared.cache_clear()
    _noe_prepared.cache_clear()
