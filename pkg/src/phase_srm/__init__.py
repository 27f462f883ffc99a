"""Optimal displacement-parameter estimation from N identical pure states.

Square-root measurements on the total-eigenvalue ladder, their global
optimality certificates, Monte Carlo checks and the qubit circuits that
realize them.
"""
from .errors import PhaseSRMError
from .optimality import Verdict, certify, max_average_score
from .pom import Pom, sample_states, srm
from .symstate import StateSpec, make_state_spec, overlap_coefficients, symmetric_amplitudes

__all__ = [
    "PhaseSRMError",
    "Pom",
    "StateSpec",
    "Verdict",
    "certify",
    "make_state_spec",
    "max_average_score",
    "overlap_coefficients",
    "sample_states",
    "srm",
    "symmetric_amplitudes",
]
