"""Closed-form performance predictions for noisy DQI.

The central object is the symmetric tridiagonal matrix ``A(m, l, d)`` with
diagonal ``(0, d, 2d, ..., ld)`` and off-diagonal ``a_k = sqrt(k (m - k + 1))``.
With a unit coefficient vector ``w`` and a code satisfying ``2l + 1 < d_perp``
the expected number of satisfied constraints after depolarizing noise is::

    m r / p + tau1 * sqrt(r (p - r)) / p * w^dagger A w
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import lapack

from .dqi_state import DqiCoefficients
from .fp_linalg import DistanceCheck, check_distance_condition, row_degrees
from .instance import MaxLinSatInstance
from .noise import NoiseModel, tau_summary


class DistanceConditionError(ValueError):
    """The closed form needs ``2l + 1 < d_perp`` and that was not established."""


@dataclass(frozen=True)
class TridiagonalSpec:
    m: int
    l: int
    d: float
    diagonal: np.ndarray
    offdiag: np.ndarray

    @property
    def size(self) -> int:
        return self.l + 1

    def to_dense(self) -> np.ndarray:
        return np.diag(self.diagonal) + np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)

    def norm_bound(self) -> float:
        """Gershgorin bound on the spectral radius."""
        pad = np.concatenate([[0.0], np.abs(self.offdiag), [0.0]])
        return float(np.max(np.abs(self.diagonal) + pad[:-1] + pad[1:]))


def d_parameter(p: int, r: int) -> float:
    return (p - 2 * r) / math.sqrt(r * (p - r))


def build_A(m: int, l: int, d: float) -> TridiagonalSpec:
    if not 0 <= l <= m:
        raise ValueError(f"need 0 <= l <= m, got l={l}, m={m}")
    k = np.arange(1, l + 1, dtype=float)
    return TridiagonalSpec(m, l, float(d), d * np.arange(l + 1, dtype=float), np.sqrt(k * (m - k + 1)))


def sturm_count(A: TridiagonalSpec, x: float) -> int:
    """Number of eigenvalues strictly below ``x`` (LDL^T inertia)."""
    diag = A.diagonal.tolist()
    off2 = (A.offdiag**2).tolist()
    # minimum pivot as in LAPACK's dstebz keeps off2 / q finite
    pivmin = np.finfo(float).tiny * max(1.0, max(off2, default=0.0))
    count = 0
    q = diag[0] - x
    for k in range(A.size):
        if k:
            q = diag[k] - x - off2[k - 1] / q
        if abs(q) < pivmin:
            q = -pivmin
        if q < 0:
            count += 1
    return count


def max_eigenvalue(A: TridiagonalSpec, rel_tol: float = 1e-13) -> float:
    """Largest eigenvalue by Sturm-sequence bisection."""
    if A.size == 1:
        return float(A.diagonal[0])
    pad = np.concatenate([[0.0], np.abs(A.offdiag), [0.0]])
    lo = float(np.min(A.diagonal - pad[:-1] - pad[1:]))
    hi = float(np.max(A.diagonal + pad[:-1] + pad[1:]))
    scale = max(A.norm_bound(), 1.0)
    n = A.size
    while hi - lo > rel_tol * scale:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if sturm_count(A, mid) < n:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _inverse_iteration(A: TridiagonalSpec, lam: float, iters: int = 3) -> np.ndarray:
    n = A.size
    scale = max(A.norm_bound(), 1.0)
    shift = lam + 1e-14 * scale
    x = np.ones(n) / math.sqrt(n)
    for _ in range(iters):
        for bump in range(8):
            dl = A.offdiag.copy()
            du = A.offdiag.copy()
            dd = A.diagonal - shift
            _, _, _, sol, info = lapack.dgtsv(dl, dd, du, x.copy())
            if info == 0 and np.all(np.isfinite(sol)):
                break
            shift += 10.0 ** (bump - 12) * scale
        else:
            raise ArithmeticError("inverse iteration failed to factor the shifted matrix")
        x = sol / np.linalg.norm(sol)
    return x


def principal_eigenpair(A: TridiagonalSpec) -> tuple:
    """``(lambda_max, w)`` with ``w`` unit norm and its first nonzero entry positive."""
    lam = max_eigenvalue(A)
    if A.size == 1:
        return lam, np.ones(1)
    w = _inverse_iteration(A, lam)
    nz = np.nonzero(np.abs(w) > 1e-300)[0]
    if len(nz) and w[nz[0]] < 0:
        w = -w
    return lam, w


def quadratic_form(A: TridiagonalSpec, w) -> float:
    """``w^dagger A w`` accumulated with ``math.fsum``."""
    w = np.asarray(w, dtype=complex)
    if w.shape != (A.size,):
        raise ValueError(f"w must have length {A.size}")
    terms = list((A.diagonal * np.abs(w) ** 2).tolist())
    cross = (np.conj(w[:-1]) * w[1:]).real * A.offdiag
    terms.extend((2.0 * cross).tolist())
    return math.fsum(terms)


def principal_coefficients(m: int, l: int, d: float) -> DqiCoefficients:
    return DqiCoefficients(principal_eigenpair(build_A(m, l, d))[1])


def _require_distance(inst: MaxLinSatInstance, l: int, distance_check):
    if distance_check is None:
        distance_check = check_distance_condition(inst.B, l)
    if isinstance(distance_check, DistanceCheck):
        if distance_check.holds is None:
            raise DistanceConditionError("distance condition undecided within the enumeration budget")
        if not distance_check.holds:
            raise DistanceConditionError(f"2l+1 < d_perp fails for l={l}")
    elif distance_check is not True:
        raise DistanceConditionError("distance condition not established")


def excess_factor(inst: MaxLinSatInstance, coeffs: DqiCoefficients) -> float:
    """``sqrt(r (p - r)) / p * w^dagger A w``."""
    p, r = inst.p, inst.r
    A = build_A(inst.m, coeffs.l, d_parameter(p, r))
    return math.sqrt(r * (p - r)) / p * quadratic_form(A, coeffs.w)


def expected_score_theorem1(
    inst: MaxLinSatInstance,
    coeffs: DqiCoefficients,
    noise: NoiseModel,
    distance_check=None,
    row_damping=None,
) -> float:
    """Closed-form expected number of satisfied constraints.

    ``distance_check`` may be a precomputed :class:`DistanceCheck` or ``True``;
    by default the condition is verified here.
    """
    if not coeffs.is_normalized:
        raise ValueError("the closed form needs a unit coefficient vector")
    _require_distance(inst, coeffs.l, distance_check)
    tau1 = tau_summary(inst.B, noise, row_damping).tau1
    return math.fsum([inst.m * inst.r / inst.p, tau1 * excess_factor(inst, coeffs)])


def score_bounds_sparsity(
    inst: MaxLinSatInstance, coeffs: DqiCoefficients, noise: NoiseModel, L1: int, L2: int
) -> tuple:
    """Bracket on ``<s> - m r / p`` from row degrees confined to ``[L1, L2]``."""
    deg = row_degrees(inst.B)
    if L1 > L2 or deg.min() < L1 or deg.max() > L2:
        raise ValueError(f"row degrees span [{deg.min()}, {deg.max()}], outside [{L1}, {L2}]")
    X = excess_factor(inst, coeffs)
    lo, hi = (1 - noise.epsilon) ** L2 * X, (1 - noise.epsilon) ** L1 * X
    return (min(lo, hi), max(lo, hi))


def asymptotic_lambda(mu: float, d: float) -> float:
    """Limit of ``lambda_max(A(m, mu m, d)) / m`` as ``m -> infinity``."""
    if not 0 < mu <= 0.5:
        raise ValueError("need 0 < mu <= 1/2")
    if d < -(1 - 2 * mu) / math.sqrt(mu * (1 - mu)):
        raise ValueError("d below -(1 - 2 mu) / sqrt(mu (1 - mu))")
    return mu * d + 2 * math.sqrt(mu * (1 - mu))


def asymptotic_optimal_score(mu: float, r_over_p: float, noise_tau1: float) -> float:
    """Limit of ``<s>_opt / m`` with the principal coefficient vector.

    Valid when ``mu <= 1/2`` and ``mu <= 1 - r/p``; outside that range the edge
    of the spectrum is no longer at ``k = l``.
    """
    rho = r_over_p
    if not 0 < rho < 1:
        raise ValueError("r/p must lie in (0, 1)")
    if not 0 < mu <= 0.5 or mu > 1 - rho + 1e-15:
        raise ValueError(f"need 0 < mu <= min(1/2, 1 - r/p), got mu={mu}")
    return rho + noise_tau1 * (mu - 2 * mu * rho + 2 * math.sqrt(rho * (1 - rho)) * math.sqrt(mu * (1 - mu)))


EXPONENT_MODES = ("m1", "m1sq")


def xorsat_lower_bound_theorem3(
    inst: MaxLinSatInstance,
    coeffs: DqiCoefficients,
    noise: NoiseModel,
    gamma_max: float,
    exponent_mode: str = "m1sq",
) -> float:
    """Lower bound on the right-hand-side-averaged score with a decoder that
    fails on a fraction ``gamma_max`` of each weight class.

    ``exponent_mode="m1"`` uses the penalty ``(m+1) gamma/(1-gamma)``,
    ``"m1sq"`` the weaker ``(m+1)^2 gamma/(1-gamma)``.
    """
    if inst.p != 2 or inst.r != 1:
        raise ValueError("the bound is for p = 2, r = 1")
    if not 0 <= gamma_max < 1:
        raise ValueError("gamma_max must lie in [0, 1)")
    if exponent_mode not in EXPONENT_MODES:
        raise ValueError(f"exponent_mode must be one of {EXPONENT_MODES}")
    m = inst.m
    tau = tau_summary(inst.B, noise)
    A = build_A(m, coeffs.l, 0.0)
    ratio = quadratic_form(A, coeffs.w) / coeffs.norm_sq
    power = 1 if exponent_mode == "m1" else 2
    penalty = tau.tau_inf * (m + 1) ** power * gamma_max / (1 - gamma_max)
    return math.fsum([m / 2, 0.5 * tau.tau1 * ratio, -penalty])
