"""Coined quantum walks and state transfer on complete bipartite graphs.

Simulates the flip-flop-shift / Grover-coin walk on the arc space of a
complete bipartite graph (optionally with weighted self-loops), provides
closed-form transfer fidelities with their invariant-subspace models, and
runs the passive and active-switch transfer protocols.
"""

from .analytic import (
    best_parity_step,
    fidelity_diff_gg,
    fidelity_diff_gi,
    fidelity_lqw,
    fidelity_same,
    grover_angle,
    lqw_angle,
    maximize_fidelity,
    t_max_equal,
)
from .graph import (
    ArcBasis,
    BipartiteSpec,
    Vertex,
    WalkState,
    build_basis,
    fidelity,
    loop_state,
    random_state,
    receiver_target_state,
    stationary_state,
    uniform_sender_state,
)
from .operators import CoinConfig, CoinKind, MarkedScenario, apply_coin, apply_shift, evolve, step
from .protocols import (
    SwitchSchedule,
    TransferReport,
    run_active_switch,
    run_transfer,
    sweep_active_switch,
    sweep_max_fidelity,
    switch_spec,
    transfer_window,
)
from .reduced import (
    EigenSystem,
    ReducedOperator,
    SubspaceBasis,
    build_subspace,
    embed,
    numeric_eigensystem,
    principal_angles,
    project,
    reduced_eigensystem,
    reduced_matrix,
    sigma_eigen_coefficients,
    sigma_reconstruction_error,
    sigma_subspace_coefficients,
    sigma_subspace_limit,
)

__version__ = "0.1.0"

__all__ = [
    "ArcBasis",
    "BipartiteSpec",
    "CoinConfig",
    "CoinKind",
    "EigenSystem",
    "MarkedScenario",
    "ReducedOperator",
    "SubspaceBasis",
    "SwitchSchedule",
    "TransferReport",
    "Vertex",
    "WalkState",
    "apply_coin",
    "apply_shift",
    "best_parity_step",
    "build_basis",
    "build_subspace",
    "embed",
    "evolve",
    "fidelity",
    "fidelity_diff_gg",
    "fidelity_diff_gi",
    "fidelity_lqw",
    "fidelity_same",
    "grover_angle",
    "loop_state",
    "lqw_angle",
    "maximize_fidelity",
    "numeric_eigensystem",
    "principal_angles",
    "project",
    "random_state",
    "receiver_target_state",
    "reduced_eigensystem",
    "reduced_matrix",
    "run_active_switch",
    "run_transfer",
    "sigma_eigen_coefficients",
    "sigma_reconstruction_error",
    "sigma_subspace_coefficients",
    "sigma_subspace_limit",
    "stationary_state",
    "step",
    "sweep_active_switch",
    "sweep_max_fidelity",
    "switch_spec",
    "t_max_equal",
    "transfer_window",
    "uniform_sender_state",
]
