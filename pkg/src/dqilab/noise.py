"""Local depolarizing noise before a computational-basis measurement.

``E(rho) = (1 - eps) rho + eps Tr(rho) I / p`` on every qudit.  Because the
readout is diagonal, the measured distribution equals that of the noiseless
state followed by independent per-symbol replacement: with probability ``eps``
a symbol is overwritten by a uniformly random one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dqi_state import AmplitudeVector
from .fp_linalg import FpMatrix, all_assignments, row_degrees
from .instance import MaxLinSatInstance

NORM_TOL = 1e-6


class NotNormalizedError(ValueError):
    pass


@dataclass(frozen=True)
class NoiseModel:
    epsilon: float

    def __post_init__(self):
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError(f"depolarizing rate must lie in [0, 1], got {self.epsilon}")


@dataclass(frozen=True)
class SparsitySummary:
    """Per-row survival factors ``(1 - eps)^|b_i|`` with their mean and max."""

    tau_rows: np.ndarray
    tau1: float
    tau_inf: float


def tau_summary(B: FpMatrix, noise: NoiseModel, row_damping=None) -> SparsitySummary:
    """``row_damping`` optionally replaces ``(1 - eps)^|b_i|`` row by row, e.g. for
    a Pauli channel other than the depolarizing one."""
    if row_damping is None:
        tau = (1.0 - noise.epsilon) ** row_degrees(B).astype(float)
    else:
        tau = np.asarray(row_damping, dtype=float)
        if tau.shape != (B.rows,):
            raise ValueError("row_damping needs one entry per row of B")
        if np.any(tau < 0) or np.any(tau > 1):
            raise ValueError("row damping factors must lie in [0, 1]")
    return SparsitySummary(tau, math.fsum(tau) / len(tau), float(tau.max()))


def _check_normalized(state: AmplitudeVector):
    nrm = state.norm_sq
    if abs(nrm - 1.0) > NORM_TOL:
        raise NotNormalizedError(f"state has squared norm {nrm}; normalize before measuring")


def noisy_output_distribution(state: AmplitudeVector, noise: NoiseModel, axis_order=None) -> np.ndarray:
    """Outcome probabilities of measuring ``E^{(x) n}(|psi><psi|)``, flattened in
    mixed-radix order.  Axes are mixed one at a time; the order is irrelevant."""
    _check_normalized(state)
    eps, p = noise.epsilon, state.p
    q = state.probabilities().reshape((p,) * state.n)
    axes = range(state.n) if axis_order is None else axis_order
    for axis in axes:
        q = (1.0 - eps) * q + (eps / p) * q.sum(axis=axis, keepdims=True)
    return q.reshape(-1)


def noisy_sampler(state: AmplitudeVector, noise: NoiseModel, seed, shots: int) -> np.ndarray:
    """Draw ``shots`` noisy measurement outcomes as rows of a ``(shots, n)`` array."""
    _check_normalized(state)
    rng = np.random.default_rng(seed)
    probs = state.probabilities()
    probs = probs / probs.sum()
    idx = rng.choice(probs.size, size=shots, p=probs)
    X = all_assignments(state.p, state.n)[idx]
    hit = rng.random(X.shape) < noise.epsilon
    X[hit] = rng.integers(0, state.p, size=int(hit.sum()))
    return X


def expected_score_exact(inst: MaxLinSatInstance, state: AmplitudeVector, noise: NoiseModel) -> float:
    """Expected number of satisfied constraints for the noisy measurement."""
    q = noisy_output_distribution(state, noise)
    return math.fsum(q * inst.all_scores())


def sampled_score(inst: MaxLinSatInstance, samples: np.ndarray) -> tuple:
    """Sample mean of the score and its standard error."""
    s = inst.scores_of(samples).astype(float)
    se = float(s.std(ddof=1) / math.sqrt(len(s))) if len(s) > 1 else float("nan")
    return float(s.mean()), se
