# Channel Module
"""
Exactly-averaged RB: twirl coefficients, regrouped layer propagation,
Markovian refresh, closed forms and trajectory-sum oracles.
"""

from spinbath.channel.twirl import (
    TwirlCoeffs,
    TrajectoryPair,
    twirl_coeffs,
    haar_twirl_reference,
    hamming_distance,
    trajectory_weight,
)
from spinbath.channel.closed_form import (
    markovian_rate,
    markovian_fidelity_closed,
    xi_fidelity_closed,
    trajectory_operators,
    trajectory_sum_fidelity,
    avg_photon_bruteforce,
)
from spinbath.channel.propagation import (
    AveragedState,
    PhotonStatistics,
    propagate_layer,
    propagate,
    refresh_env,
    rb_output,
    rb_decay,
    ground_state,
    avg_photon_efficient,
    photon_statistics,
)

__all__ = [
    "TwirlCoeffs",
    "TrajectoryPair",
    "twirl_coeffs",
    "haar_twirl_reference",
    "hamming_distance",
    "trajectory_weight",
    "markovian_rate",
    "markovian_fidelity_closed",
    "xi_fidelity_closed",
    "trajectory_operators",
    "trajectory_sum_fidelity",
    "avg_photon_bruteforce",
    "AveragedState",
    "PhotonStatistics",
    "propagate_layer",
    "propagate",
    "refresh_env",
    "rb_output",
    "rb_decay",
    "ground_state",
    "avg_photon_efficient",
    "photon_statistics",
]
