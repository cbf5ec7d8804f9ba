"""Decoded quantum interferometry under local depolarizing noise.

Exact dense simulation, closed-form predictions and brute-force oracles for
Max-LinSAT over prime fields.
"""

from .dqi_state import (
    AmplitudeVector,
    DqiCoefficients,
    build_dqi_state,
    fourier_state,
    gram_matrix,
    read_state,
    symmetric_poly_values,
    syndrome_side_state,
    write_state,
)
from .fp_linalg import FpMatrix, check_distance_condition
from .instance import (
    DegreeDistribution,
    MaxLinSatInstance,
    make_opi,
    make_random_instance,
    make_xorsat,
    read_instance,
    write_instance,
)
from .noise import NoiseModel, expected_score_exact, noisy_output_distribution, noisy_sampler, tau_summary
from .predictor import (
    DistanceConditionError,
    asymptotic_lambda,
    asymptotic_optimal_score,
    build_A,
    expected_score_theorem1,
    principal_eigenpair,
    score_bounds_sparsity,
    xorsat_lower_bound_theorem3,
)

__version__ = "0.1.0"
