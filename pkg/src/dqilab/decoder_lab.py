"""Imperfect decoding: syndrome tables, the decodable/failed split, and the
postselected DQI state that results.

A decoder sees only the syndrome ``B^T y``.  Errors it recovers form ``D``; the
rest form ``F``.  Postselecting on a cleared error register keeps only the
``y in D`` terms of the syndrome-side state.  This module builds that state
exactly, the quadratic-form matrix ``Abar`` whose ratio with the state norm
gives the noisy expected score, and the correction ``D`` relating the averaged
imperfect matrix to the perfect one.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .dqi_state import (
    AmplitudeVector,
    DqiCoefficients,
    build_g_table,
    errors_up_to,
    fourier_state,
    g_tilde_of_errors,
    syndrome_histogram,
    syndrome_side_state,
)
from .fp_linalg import DEFAULT_ENUMERATION_BUDGET, PrimeModulus, vector_index
from .instance import MaxLinSatInstance
from .noise import NoiseModel, expected_score_exact, tau_summary
from .oracles import row_character_damping
from .predictor import xorsat_lower_bound_theorem3


@dataclass
class SyndromeTable:
    """Lookup from syndrome to the error the decoder reports."""

    p: int
    n: int
    m: int
    entries: dict = field(default_factory=dict)
    collisions: list = field(default_factory=list)
    dropped: list = field(default_factory=list)

    def decode(self, syndrome):
        hit = self.entries.get(tuple(int(v) for v in syndrome))
        return None if hit is None else np.array(hit, dtype=np.int64)

    def __len__(self):
        return len(self.entries)

    def decodable_by_weight(self, l: int) -> list:
        """``[D_0, ..., D_l]`` as lexicographically sorted arrays."""
        groups = [[] for _ in range(l + 1)]
        for err in self.entries.values():
            k = sum(1 for v in err if v)
            if k <= l:
                groups[k].append(err)
        return [np.array(sorted(g), dtype=np.int64).reshape(-1, self.m) for g in groups]


@dataclass(frozen=True, eq=False)
class DecoderPartition:
    """Per-weight decodable sets ``D_k``, failures ``F_k`` and rates ``gamma_k = |F_k| / |E_k|``."""

    D: list
    F: list
    gamma: np.ndarray
    gamma_max: float

    @property
    def l(self) -> int:
        return len(self.D) - 1


@dataclass(frozen=True)
class DecoderPolicy:
    """``inject`` maps a weight ``k >= 1`` to the fraction of ``E_k`` to force into ``F_k``."""

    inject: dict = field(default_factory=dict)
    seed: int = 0


def _partition_from_table(table: SyndromeTable, errors: list) -> DecoderPartition:
    p, m = table.p, table.m
    D = table.decodable_by_weight(len(errors) - 1)
    F, gamma = [], []
    for k, Ek in enumerate(errors):
        keep = {tuple(e) for e in D[k].tolist()}
        Fk = np.array([e for e in Ek.tolist() if tuple(e) not in keep], dtype=np.int64).reshape(-1, m)
        F.append(Fk)
        gamma.append(len(Fk) / ((p - 1) ** k * math.comb(m, k)))
    gamma = np.array(gamma)
    return DecoderPartition(D, F, gamma, float(gamma.max()))


def build_decoder(
    inst: MaxLinSatInstance,
    l: int,
    policy: DecoderPolicy | None = None,
    budget: int = DEFAULT_ENUMERATION_BUDGET,
) -> tuple:
    """Minimum-weight coset-leader table over all errors of weight ``<= l``.

    Errors are visited by weight, then lexicographically, so the first error
    to claim a syndrome is kept.  ``policy`` can then delete a seeded fraction
    of the weight-``k`` entries; the affected errors move into ``F_k``.
    Returns ``(table, partition)``.
    """
    policy = policy or DecoderPolicy()
    errors = errors_up_to(inst.m, inst.p, l, budget)
    table = SyndromeTable(inst.p, inst.n, inst.m)
    for Ek in errors:
        syn = (Ek @ inst.B.data) % inst.p
        for e, s in zip(Ek.tolist(), syn.tolist()):
            key = tuple(s)
            if key in table.entries:
                table.collisions.append((key, table.entries[key], tuple(e)))
            else:
                table.entries[key] = tuple(e)
    rng = np.random.default_rng(policy.seed)
    for k in sorted(policy.inject):
        frac = policy.inject[k]
        if not 1 <= k <= l:
            raise ValueError(f"can only inject failures at weights 1..{l}, got {k}")
        if not 0.0 <= frac <= 1.0:
            raise ValueError("injection fraction must lie in [0, 1]")
        target = round(frac * len(errors[k]))
        keys = sorted(s for s, e in table.entries.items() if sum(1 for v in e if v) == k)
        have = len(errors[k]) - len(keys)
        drop = max(0, min(target - have, len(keys)))
        for idx in sorted(rng.choice(len(keys), size=drop, replace=False).tolist()):
            table.dropped.append((keys[idx], table.entries.pop(keys[idx])))
    return table, _partition_from_table(table, errors)


def export_table(table: SyndromeTable) -> str:
    """One ``syndrome : error`` line per entry, sorted by syndrome."""
    lines = []
    for s in sorted(table.entries):
        lines.append(" ".join(map(str, s)) + " : " + " ".join(map(str, table.entries[s])))
    return "\n".join(lines) + ("\n" if lines else "")


def _decodable(table_or_partition, l: int) -> list:
    if isinstance(table_or_partition, DecoderPartition):
        return table_or_partition.D[: l + 1]
    return table_or_partition.decodable_by_weight(l)


def build_imperfect_state(inst: MaxLinSatInstance, coeffs: DqiCoefficients, table) -> AmplitudeVector:
    """Unnormalized postselected state: the syndrome-side sum restricted to ``D``,
    brought back by the inverse Fourier transform."""
    D = _decodable(table, coeffs.l)
    if len(D) < coeffs.l + 1:
        raise ValueError("the decoder covers fewer weights than the coefficient vector")
    return fourier_state(syndrome_side_state(inst, coeffs, D), inverse=True)


def norm_from_partition(inst: MaxLinSatInstance, coeffs: DqiCoefficients, table) -> float:
    """``sum_k |w_k|^2 / C(m, k) sum_{y in D_k} |g_tilde(y)|^2``."""
    gt = build_g_table(inst)
    terms = []
    for k, Dk in enumerate(_decodable(table, coeffs.l)):
        mass = math.fsum(np.abs(g_tilde_of_errors(gt, Dk)) ** 2) if len(Dk) else 0.0
        terms.append(abs(coeffs.w[k]) ** 2 / math.comb(inst.m, k) * mass)
    return math.fsum(terms)


def norm_lemma_check(inst: MaxLinSatInstance, coeffs: DqiCoefficients, table) -> tuple:
    """``(statevector norm^2, norm^2 from the decodable sets)``."""
    return build_imperfect_state(inst, coeffs, table).norm_sq, norm_from_partition(inst, coeffs, table)


def norm_binary(coeffs: DqiCoefficients, partition: DecoderPartition) -> float:
    """For ``p = 2``, ``r = 1``: ``sum_k |w_k|^2 (1 - gamma_k)``."""
    return math.fsum(abs(w) ** 2 * (1 - g) for w, g in zip(coeffs.w, partition.gamma))


def expected_score_imperfect(
    inst: MaxLinSatInstance, coeffs: DqiCoefficients, noise: NoiseModel, table
) -> float:
    state = build_imperfect_state(inst, coeffs, table)
    if state.norm_sq <= 1e-300:
        raise ZeroDivisionError("the decoder discards every term of the state")
    return expected_score_exact(inst, state.normalized(), noise)


def _row_factors(inst: MaxLinSatInstance, noise: NoiseModel, row_damping=None) -> np.ndarray:
    """``c[i, a] = (1/p) chi_i(a) sum_{v in F_i} omega^(-a v)`` with ``chi_i(0) = 1`` and
    ``chi_i(a != 0)`` the row's character damping under the noise."""
    p, m = inst.p, inst.m
    if row_damping is None:
        chi = np.array([row_character_damping(inst.B.data[i], p, noise.epsilon) for i in range(m)])
    else:
        chi = np.asarray(row_damping, dtype=float)
    mod = PrimeModulus(p)
    c = np.zeros((m, p), dtype=complex)
    for i, F in enumerate(inst.sets):
        for a in range(p):
            s = mod.omega((-a * np.array(F)) % p).sum()
            c[i, a] = s / p * (1.0 if a == 0 else chi[i])
    return c


def build_Abar(
    inst: MaxLinSatInstance, noise: NoiseModel, errors_by_weight: list, row_damping=None
) -> np.ndarray:
    """``Abar[k1, k2] = C(m,k1)^(-1/2) C(m,k2)^(-1/2) sum_{i,a} c[i,a]
    sum g_tilde(y1)^* g_tilde(y2)`` over ``y1`` in set ``k1``, ``y2`` in set ``k2`` with
    ``B^T y2 = B^T y1 + a b_i``."""
    p, m = inst.p, inst.m
    L = len(errors_by_weight)
    gt = build_g_table(inst)
    c = _row_factors(inst, noise, row_damping)
    vals = [g_tilde_of_errors(gt, Y) for Y in errors_by_weight]
    hist = [syndrome_histogram(inst, Y, v) for Y, v in zip(errors_by_weight, vals)]
    # shifted[k1][i, a] -> syndrome indices of B^T y1 + a b_i for y1 in set k1
    shifts = (np.arange(p)[None, :, None] * inst.B.data[:, None, :]) % p  # (m, p, n)
    Abar = np.zeros((L, L), dtype=complex)
    for k1, Y1 in enumerate(errors_by_weight):
        if len(Y1) == 0:
            continue
        syn = (Y1 @ inst.B.data) % p  # (N, n)
        idx = vector_index(((syn[:, None, None, :] + shifts[None]) % p).reshape(-1, inst.n), p)
        idx = idx.reshape(len(Y1), m, p)
        weighted = np.conj(vals[k1])[:, None, None] * c[None]  # (N, m, p)
        for k2 in range(L):
            Abar[k1, k2] = np.sum(weighted * hist[k2][idx])
        for k2 in range(L):
            Abar[k1, k2] /= math.sqrt(math.comb(m, k1) * math.comb(m, k2))
    return Abar


def build_Abar_E(inst: MaxLinSatInstance, noise: NoiseModel, l: int, row_damping=None) -> np.ndarray:
    """``Abar`` over all errors of weight ``<= l`` (perfect decoder)."""
    return build_Abar(inst, noise, errors_up_to(inst.m, inst.p, l), row_damping)


def build_Abar_D(inst: MaxLinSatInstance, noise: NoiseModel, table, l: int, row_damping=None) -> np.ndarray:
    """``Abar`` restricted to decodable errors."""
    return build_Abar(inst, noise, _decodable(table, l), row_damping)


def abar_score(Abar: np.ndarray, coeffs: DqiCoefficients, norm_sq: float) -> float:
    """``w^dagger Abar w / norm^2``."""
    w = coeffs.w
    return float(np.real(np.conj(w) @ Abar @ w)) / norm_sq


def averaged_over_sets(inst: MaxLinSatInstance, fn, max_configs: int = 1 << 16):
    """Mean of ``fn(instance)`` over every assignment of r-subsets to the rows."""
    subsets = list(itertools.combinations(range(inst.p), inst.r))
    total = len(subsets) ** inst.m
    if total > max_configs:
        raise OverflowError(f"{total} set configurations exceed the cap {max_configs}")
    acc = None
    for choice in itertools.product(subsets, repeat=inst.m):
        v = fn(inst.with_sets(choice))
        acc = v if acc is None else acc + v
    return acc / total


def transition_counts(inst: MaxLinSatInstance, partition: DecoderPartition) -> np.ndarray:
    """``T[i, a, k1, k2]``: pairs ``(y1, y1 + a e_i)`` of weights ``(k1, k2)`` with
    at least one member in ``F``.  Only ``k2 in {k1, k1 + 1}`` is filled."""
    p, m, l = inst.p, inst.m, partition.l
    failed = [{tuple(e) for e in Fk.tolist()} for Fk in partition.F]
    T = np.zeros((m, p, l + 1, l + 1), dtype=np.int64)
    for k1 in range(l + 1):
        for y1 in errors_up_to(m, p, k1)[k1].tolist():
            in_f1 = tuple(y1) in failed[k1]
            for i in range(m):
                for a in range(1, p):
                    y2 = list(y1)
                    y2[i] = (y2[i] + a) % p
                    k2 = k1 + (y1[i] == 0) - (y2[i] == 0)
                    if k2 not in (k1, k1 + 1) or k2 > l:
                        continue
                    if in_f1 or tuple(y2) in failed[k2]:
                        T[i, a, k1, k2] += 1
    return T


def build_D_correction(
    inst: MaxLinSatInstance,
    noise: NoiseModel,
    partition: DecoderPartition,
    diagonal_offset: bool = False,
    check_bound: bool = True,
) -> np.ndarray:
    """Correction ``Dc`` with ``E_F[Abar_D] = E_F[Abar_E] - Dc`` (sets averaged uniformly).

    ``diagonal_offset=True`` subtracts ``|F_k|`` from each diagonal transition
    count, a variant kept only so tests can show it disagrees with the
    exhaustive average.  For ``p = 2``, ``r = 1`` the operator-norm distance of
    ``Dc`` from ``(m/2) diag(gamma)`` is checked against
    ``tau_inf (m + 1) gamma_max`` unless ``check_bound`` is false.
    """
    p, r, m, l = inst.p, inst.r, inst.m, partition.l
    tau = tau_summary(inst.B, noise)
    T = transition_counts(inst, partition)
    Dc = np.zeros((l + 1, l + 1))
    for k in range(l + 1):
        diag = m * r / p * partition.gamma[k]
        if p > 2 and p != 2 * r:
            counts = T[:, 1:, k, k].astype(float)
            if diagonal_offset:
                counts = counts - len(partition.F[k])
            weighted = math.fsum((counts.sum(axis=1) * tau.tau_rows).tolist())
            diag += (p - 2 * r) / (p * math.comb(m, k) * (p - 1) ** k * (p - 2)) * weighted
        Dc[k, k] = diag
        if k < l:
            weighted = math.fsum((T[:, 1:, k, k + 1].sum(axis=1) * tau.tau_rows).tolist())
            off = math.sqrt(r * (p - r)) / ((p - 1) ** (k + 1) * p) * weighted
            off /= math.sqrt(math.comb(m, k) * math.comb(m, k + 1))
            Dc[k, k + 1] = Dc[k + 1, k] = off
    if check_bound and p == 2 and r == 1:
        dist, bound = correction_bound(inst, noise, partition, Dc)
        if dist > bound * (1 + 1e-12) + 1e-12:
            raise ArithmeticError(f"correction norm {dist} exceeds {bound}")
    return Dc


def correction_bound(inst: MaxLinSatInstance, noise: NoiseModel, partition: DecoderPartition, Dc) -> tuple:
    """``(||Dc - (m r / p) diag(gamma)||_2, tau_inf (m + 1) gamma_max)``."""
    tau = tau_summary(inst.B, noise)
    dev = Dc - inst.m * inst.r / inst.p * np.diag(partition.gamma)
    return float(np.linalg.norm(dev, 2)), tau.tau_inf * (inst.m + 1) * partition.gamma_max


@dataclass(frozen=True)
class Theorem3Result:
    measured_mean: float
    stderr: float
    bound_m1: float
    bound_m1sq: float
    gamma_max: float
    configurations: int

    def bound(self, mode: str = "m1sq") -> float:
        return self.bound_m1 if mode == "m1" else self.bound_m1sq


def theorem3_experiment(
    inst: MaxLinSatInstance,
    coeffs: DqiCoefficients,
    noise: NoiseModel,
    table,
    partition: DecoderPartition,
    samples: int | None = None,
    seed=0,
    exhaustive_max_m: int = 10,
) -> Theorem3Result:
    """Average the imperfect-decoder score over right-hand sides ``F_i in {{0}, {1}}``.

    Exhaustive for ``m <= exhaustive_max_m`` unless ``samples`` is given, otherwise a
    seeded Monte-Carlo average with its standard error.  The decoder depends
    only on ``B``, so one table serves every right-hand side.
    """
    if inst.p != 2 or inst.r != 1:
        raise ValueError("the experiment is for p = 2, r = 1")
    m = inst.m
    state = build_imperfect_state(inst, coeffs, table)
    if state.norm_sq <= 1e-300:
        raise ZeroDivisionError("the decoder discards every term of the state")

    def measure(rhs) -> float:
        return expected_score_imperfect(inst.with_sets(tuple((int(v),) for v in rhs)), coeffs, noise, table)

    if samples is None and m <= exhaustive_max_m:
        vals = np.array([measure(rhs) for rhs in itertools.product((0, 1), repeat=m)])
        mean, se = math.fsum(vals) / len(vals), 0.0
    else:
        rng = np.random.default_rng(seed)
        count = samples or 1000
        vals = np.array([measure(rng.integers(0, 2, size=m)) for _ in range(count)])
        mean = math.fsum(vals) / len(vals)
        se = float(vals.std(ddof=1) / math.sqrt(len(vals))) if len(vals) > 1 else float("nan")
    gmax = partition.gamma_max
    return Theorem3Result(
        mean,
        se,
        xorsat_lower_bound_theorem3(inst, coeffs, noise, gmax, "m1"),
        xorsat_lower_bound_theorem3(inst, coeffs, noise, gmax, "m1sq"),
        gmax,
        len(vals),
    )
