"""Closed-form asymptotes and per-round trajectories."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

FORMULAS = ("sr", "ppa", "noe", "gnoe", "sr2", "sr3", "noe_hbac")


def _xi(eps_b: float) -> float:
    if not 0.0 <= eps_b < 1.0:
        raise ValueError(f"bath polarization must lie in [0, 1), got {eps_b!r}")
    return math.atanh(eps_b)


def _check_n(n: int, lowest: int) -> int:
    if isinstance(n, bool) or int(n) != n or n < lowest:
        raise ValueError(f"n must be an integer >= {lowest}, got {n!r}")
    return int(n)


def predict_ppa_asymptote(n: int, eps_b: float) -> float:
    """PPA limit with one reset qubit among n.

    ((1+e)^M - (1-e)^M) / ((1+e)^M + (1-e)^M) with M = 2^(n-2) equals
    tanh(M xi_b); the tanh form never overflows.
    """
    n = _check_n(n, 2)
    return math.tanh(2.0 ** (n - 2) * _xi(eps_b))


def predict_sr_asymptote(n: int, eps_b: float) -> float:
    n = _check_n(n, 1)
    return math.tanh((2.0 ** n - 1.0) * _xi(eps_b))


def predict_noe_asymptote(eps_b: float) -> float:
    return math.tanh(2.0 * _xi(eps_b))


def predict_generalized_noe(n: int, eps_b: float) -> float:
    """n * eps_b. Derived for low polarization only; not an exact limit."""
    n = _check_n(n, 2)
    _xi(eps_b)
    return n * eps_b


def noe_hbac_coefficients(n: int, mode: str = "subset_three_bit_sort") -> tuple[int, ...]:
    """Low-polarization limit of NOE-based cooling in units of eps_b, target first.

    Three-bit compressions give a Fibonacci-like tail (.., 5, 3, 2, 1); full
    SORT windows give each qubit the sum of all the qubits below it.
    """
    n = _check_n(n, 2)
    coeffs = [1, 2]
    for _ in range(n - 2):
        if mode == "subset_three_bit_sort":
            coeffs.append(coeffs[-1] + coeffs[-2])
        elif mode == "full_sort":
            coeffs.append(sum(coeffs))
        else:
            raise ValueError(f"unknown compression mode {mode!r}")
    return tuple(reversed(coeffs))


def affine_orbit(x0: float, slope: float, offset: float, k: float) -> float:
    """k-th iterate of x -> slope * x + offset; k = inf gives the fixed point."""
    if k == math.inf:
        return offset / (1.0 - slope)
    if k < 0 or int(k) != k:
        raise ValueError(f"round index must be a nonnegative integer, got {k!r}")
    x = x0
    for _ in range(int(k)):
        x = slope * x + offset
    return x


def sr2_map(eps_b: float) -> tuple[float, float]:
    """(slope, offset) of eps_{k+1} = sech(2xi)/2 [sinh(3xi) sech(xi) + eps_k]."""
    xi = _xi(eps_b)
    half_sech = 0.5 / math.cosh(2 * xi)
    return half_sech, half_sech * math.sinh(3 * xi) / math.cosh(xi)


def sr3_map(eps_b: float) -> tuple[float, float]:
    """(slope, offset) of the three-qubit round with ideal preparation."""
    xi = _xi(eps_b)
    keep = 2 * math.cosh(xi) + math.cosh(5 * xi)
    denom = keep + math.cosh(7 * xi)
    return keep / denom, math.sinh(7 * xi) / denom


def _check_mode(mode: str) -> str:
    if mode not in ("exact", "low_pol"):
        raise ValueError(f"mode must be 'exact' or 'low_pol', got {mode!r}")
    return mode


def predict_sr2_trajectory(k: float, eps_b: float, mode: str = "exact") -> float:
    if _check_mode(mode) == "low_pol":
        _xi(eps_b)
        return (3.0 - 2.0 ** (1 - k)) * eps_b
    return affine_orbit(eps_b, *sr2_map(eps_b), k)


def predict_sr3_trajectory(k: float, eps_b: float, mode: str = "exact") -> float:
    if _check_mode(mode) == "low_pol":
        _xi(eps_b)
        return (7.0 - 6.0 * 0.75 ** k) * eps_b
    return affine_orbit(eps_b, *sr3_map(eps_b), k)


@dataclass(frozen=True)
class Prediction:
    formula: str
    n: Optional[int]
    eps_b: float
    value: float
    k: Optional[float] = None

    def __post_init__(self):
        if not 0.0 <= self.value < 1.0:
            raise ValueError(f"predicted polarization {self.value!r} outside [0, 1)")


def predict(formula: str, n: Optional[int], eps_b: float, k: Optional[float] = None,
            mode: str = "exact", compression_mode: str = "subset_three_bit_sort") -> Prediction:
    """Dispatch by formula id (see FORMULAS)."""
    if formula == "sr":
        value = predict_sr_asymptote(n, eps_b)
    elif formula == "ppa":
        value = predict_ppa_asymptote(n, eps_b)
    elif formula == "noe":
        value = predict_noe_asymptote(eps_b)
    elif formula == "gnoe":
        value = predict_generalized_noe(n, eps_b)
    elif formula in ("sr2", "sr3"):
        if k is None:
            raise ValueError(f"formula {formula!r} needs a round index k")
        fn = predict_sr2_trajectory if formula == "sr2" else predict_sr3_trajectory
        value = fn(k, eps_b, mode)
    elif formula == "noe_hbac":
        _xi(eps_b)
        value = noe_hbac_coefficients(n, compression_mode)[0] * eps_b
    else:
        raise ValueError(f"unknown formula {formula!r}; choose from {', '.join(FORMULAS)}")
    return Prediction(formula, n, eps_b, value, k)
