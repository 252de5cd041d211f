"""Oracle cross-checks behind ``coolsim validate``."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .analytics import predict_noe_asymptote, predict_sr2_trajectory
from .channels import (
    RateSet,
    StateResetSpec,
    apply_kraus_dense,
    apply_matrix,
    cms,
    cms_matrix,
    gamma_n,
    kraus_completeness_error,
    kraus_operators,
    qubit_reset,
    qubit_reset_matrix,
    rate_matrix_evolve,
    state_reset,
    state_reset_matrix,
)
from .protocols import run_noe, run_sr_gamma2, sr_rounds
from .state import BathModel, DiagonalState, product_deviation, thermal_state


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def random_state(rng: np.random.Generator, n: int) -> DiagonalState:
    return DiagonalState(rng.dirichlet(np.ones(2 ** n)))


def random_reset_spec(rng: np.random.Generator, n: int) -> StateResetSpec:
    m = int(rng.integers(1, n + 1))
    qubits = tuple(int(q) + 1 for q in rng.permutation(n)[:m])
    s1, s2 = rng.choice(2 ** m, size=2, replace=False)
    bits = lambda v: tuple((int(v) >> (m - 1 - j)) & 1 for j in range(m))
    return StateResetSpec(qubits, bits(s1), bits(s2), float(rng.uniform(0.05, 0.95)))


def _result(name, err, tol):
    return CheckResult(name, bool(err <= tol), f"max error {err:.3e} (tol {tol:.0e})")


def check_kraus(rng, count=100, corrupt=False) -> list[CheckResult]:
    worst_gap = worst_complete = 0.0
    failures = []
    for _ in range(count):
        n = int(rng.integers(1, 5))
        state, spec = random_state(rng, n), random_reset_spec(rng, n)
        ops = kraus_operators(n, spec)
        if corrupt:
            ops[0] = ops[0] * 1.01
        worst_complete = max(worst_complete, kraus_completeness_error(ops))
        try:
            out = apply_kraus_dense(np.diag(state.populations), spec, ops)
        except ValueError as exc:
            failures.append(str(exc))
            continue
        gap = np.max(np.abs(np.real(np.diag(out)) - state_reset(state, spec).populations))
        worst_gap = max(worst_gap, float(gap))
    equiv = _result("kraus_vs_state_reset", worst_gap, 1e-12)
    if failures:
        equiv = CheckResult(equiv.name, False, f"{len(failures)} of {count} inputs rejected")
    return [equiv, _result("kraus_completeness", worst_complete, 1e-12)]


def check_transfer_matrices(rng, count=50) -> CheckResult:
    bath = BathModel(float(rng.uniform(0.0, 0.9)))
    worst = 0.0
    for _ in range(count):
        n = int(rng.integers(1, 5))
        state, spec = random_state(rng, n), random_reset_spec(rng, n)
        q = int(rng.integers(1, n + 1))
        pairs = [
            (state_reset(state, spec), apply_matrix(state, state_reset_matrix(n, spec))),
            (qubit_reset(state, q, bath), apply_matrix(state, qubit_reset_matrix(n, q, bath))),
            (cms(state, q), apply_matrix(state, cms_matrix(n, q))),
        ]
        for fast, slow in pairs:
            worst = max(worst, float(np.max(np.abs(fast.populations - slow.populations))))
    return _result("transfer_matrix_vs_fast_path", worst, 1e-14)


def check_rate_limit(rng, count=20) -> CheckResult:
    worst = 0.0
    for _ in range(count):
        bath = BathModel(float(rng.uniform(0.0, 0.9)))
        state = random_state(rng, 2)
        evolved = rate_matrix_evolve(state.populations, RateSet(g2=1.0), bath, t=60.0)
        target = gamma_n(state, (1, 2), bath).populations
        worst = max(worst, float(np.max(np.abs(evolved - target))))
    return _result("rate_equation_gamma2_limit", worst, 1e-6)


def check_rate_thermal(rng, count=20) -> CheckResult:
    worst = 0.0
    for _ in range(count):
        bath = BathModel(float(rng.uniform(0.0, 0.9)))
        rates = RateSet(*rng.uniform(0.5, 2.0, size=4))
        evolved = rate_matrix_evolve(random_state(rng, 2).populations, rates, bath, t=100.0)
        worst = max(worst, float(np.max(np.abs(evolved - thermal_state(2, bath).populations))))
    return _result("rate_equation_thermal_limit", worst, 1e-9)


def check_sr2(rng) -> list[CheckResult]:
    eps = float(rng.uniform(0.01, 0.9))
    trace = run_sr_gamma2(eps, 40)
    rec = max(abs(e - predict_sr2_trajectory(k, eps)) for k, e in enumerate(trace.target()))
    dev = 0.0
    for k, state in enumerate(sr_rounds(2, eps)):
        dev = max(dev, product_deviation(state))
        if k == 40:
            break
    return [_result("sr2_recursion", rec, 1e-12), _result("sr2_product_state", dev, 1e-12)]


def check_noe(rng) -> CheckResult:
    eps = float(rng.uniform(0.01, 0.9))
    target = predict_noe_asymptote(eps)
    values = run_noe(eps, 40).target()
    err = max(abs(b - (target + a) / 2) for a, b in zip(values, values[1:]))
    return _result("noe_recursion", err, 1e-14)


def run_checks(seed: int = 0, corrupt_kraus: bool = False) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    results = check_kraus(rng, corrupt=corrupt_kraus)
    results.append(check_transfer_matrices(rng))
    results.append(check_rate_limit(rng))
    results.append(check_rate_thermal(rng))
    results.extend(check_sr2(rng))
    results.append(check_noe(rng))
    return results
