# Monte Carlo Module
"""
Sampled-circuit RB: gate sets, joint-state simulation, decay estimates with
error bars, exact XI enumeration and non-Markovianity witnesses.
"""

from spinbath.montecarlo.gates import (
    GATESETS,
    GateSequence,
    haar_unitary,
    clifford_1q_table,
    clifford_index,
    xi_gates,
    check_gateset,
    sample_sequence,
)
from spinbath.montecarlo.simulation import (
    SimConfig,
    evolve_layers,
    simulate_sequence,
    survival,
    estimate_decay,
    xi_phase_factor,
    xi_exact_average,
    default_initial_state,
)
from spinbath.montecarlo.witness import (
    WitnessSeries,
    orthogonal_inputs,
    witness_series,
    witness_histogram,
    positive_fraction,
    mixed_fidelity_series,
    fuchs_van_de_graaff_violation,
)

__all__ = [
    "GATESETS",
    "GateSequence",
    "haar_unitary",
    "clifford_1q_table",
    "clifford_index",
    "xi_gates",
    "check_gateset",
    "sample_sequence",
    "SimConfig",
    "evolve_layers",
    "simulate_sequence",
    "survival",
    "estimate_decay",
    "xi_phase_factor",
    "xi_exact_average",
    "default_initial_state",
    "WitnessSeries",
    "orthogonal_inputs",
    "witness_series",
    "witness_histogram",
    "positive_fraction",
    "mixed_fidelity_series",
    "fuchs_van_de_graaff_violation",
]
