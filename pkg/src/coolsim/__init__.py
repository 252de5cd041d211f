"""Exact simulation of heat-bath algorithmic cooling with state-reset channels."""

from .channels import (
    RateSet,
    StateResetSpec,
    apply_kraus_dense,
    cms,
    gamma_n,
    p_m,
    qubit_reset,
    rate_matrix_evolve,
    solomon_steady_state,
    state_reset,
)
from .protocols import (
    ConvergenceError,
    CoolingTrace,
    InnerPolicy,
    ProtocolSpec,
    fixed_point,
    run,
    run_generalized_noe,
    run_noe,
    run_noe_based_hbac,
    run_ppa,
    run_sr_gamma2,
    run_sr_gamma3,
    run_sr_gamma_n,
)
from .state import (
    BathModel,
    DiagonalState,
    polarization,
    purity_from_polarization,
    shifted_scaled_diagonal,
    tensor,
    thermal_state,
    trace_out,
)
from .unitaries import flip_qubits, sort_compression, subset_sort

__version__ = "0.1.0"
