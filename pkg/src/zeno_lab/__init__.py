"""Qubit-memory collision model: Zeno freezing, speed limits and correlated memories."""

__version__ = "0.1.0"

from .analytic import (
    DISCONTINUITY,
    DiagonalQubitState,
    UncorrelatedPoint,
    analytic_reduced_state,
    analytic_tau_qsl,
    analytic_vqsl,
    purity_parameter,
)
from .model import (
    ModelParams,
    Schedule,
    build_mm_hamiltonian,
    build_qm_hamiltonian,
    build_schedule,
    build_total_hamiltonian,
)
from .qfi import QfiPolicy, QslCurve, qfi_from_state_pair, tau_qsl_numeric, vqsl_curve, vqsl_from_qfi
from .sim import Trajectory, evolve, initial_full_state, rank2_fast_path, simulate
from .sweep import (
    ErasureSearchConfig,
    SweepResult,
    asymptote_tau_min,
    fidelity_grid,
    find_r_crit,
    find_r_opt,
    sweep_r,
    tau_min_for_r,
)
