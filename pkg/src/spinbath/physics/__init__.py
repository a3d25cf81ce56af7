# spinbath physics module

"""
Truncated Fock-space algebra and the block-diagonal spin-boson model.
"""

from spinbath.physics.fock import (
    EnvSpace,
    EnvState,
    as_matrix,
    ModeSpec,
    build_mode_ops,
    herm_func,
    mixed_fidelity,
    partial_trace,
    pure_state,
    tensor_embed,
    thermal_env_state,
    thermal_state,
    trace_distance,
)
from spinbath.physics.spin_boson import (
    EvolutionBlocks,
    SpinBosonModel,
    block_hamiltonian,
    coupling_difference,
    delta_cos_op,
    displacement_weights,
    evolution_blocks,
    joint_hamiltonian,
    joint_step_unitary,
    projector_labels,
    weight,
)

__all__ = [
    "EnvSpace",
    "EnvState",
    "as_matrix",
    "ModeSpec",
    "build_mode_ops",
    "herm_func",
    "mixed_fidelity",
    "partial_trace",
    "pure_state",
    "tensor_embed",
    "thermal_env_state",
    "thermal_state",
    "trace_distance",
    "EvolutionBlocks",
    "SpinBosonModel",
    "block_hamiltonian",
    "coupling_difference",
    "delta_cos_op",
    "displacement_weights",
    "evolution_blocks",
    "joint_hamiltonian",
    "joint_step_unitary",
    "projector_labels",
    "weight",
]
