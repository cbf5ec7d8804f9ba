"""Exact dense construction of DQI states over F_p^n.

The state for coefficients ``w_0..w_l`` is ``sum_k w_k |P^(k)>`` where
``|P^(k)>`` has amplitude ``e_k(g_1(b_1.x), ..., g_m(b_m.x)) / sqrt(p^(n-k) C(m,k))``
and ``e_k`` is the elementary symmetric polynomial (a sum over k-subsets of
constraints).  Its Fourier transform lives on syndromes ``B^T y`` of errors of
weight at most ``l``; :func:`syndrome_side_state` builds that side directly.
"""

from __future__ import annotations

import math
import os
import struct
from dataclasses import dataclass

import numpy as np

from .fp_linalg import (
    DEFAULT_ENUMERATION_BUDGET,
    BudgetExceeded,
    PrimeModulus,
    all_assignments,
    count_weight_vectors,
    vector_index,
    weight_k_vectors,
)
from .instance import MaxLinSatInstance

DEFAULT_MAX_DIM = 1 << 24
STATE_MAGIC = b"DQIAMP01"


@dataclass(frozen=True, eq=False)
class GTable:
    """Centered, normalized constraint functions and their Fourier transforms.

    ``g[i, x] = (f_i(x) - fbar) / phi`` and
    ``g_tilde[i, y] = p^(-1/2) sum_x omega^(y x) g[i, x]``.
    """

    g: np.ndarray
    g_tilde: np.ndarray
    fbar: float
    phi: float

    @property
    def g_tilde_product_table(self) -> np.ndarray:
        """``g_tilde`` with column 0 replaced by 1, for products over nonzero coordinates."""
        t = self.g_tilde.copy()
        t[:, 0] = 1.0
        return t


def build_g_table(inst: MaxLinSatInstance) -> GTable:
    p, r = inst.p, inst.r
    fbar = 2 * r / p - 1
    phi = math.sqrt(4 * r * (1 - r / p))
    f = 2.0 * inst.indicator_table() - 1.0
    g = (f - fbar) / phi
    mod = PrimeModulus(p)
    F = mod.omega(np.outer(np.arange(p), np.arange(p))) / math.sqrt(p)
    g_tilde = g @ F.T  # g_tilde[i, y] = sum_x F[y, x] g[i, x]
    g_tilde[:, 0] = 0.0  # exactly zero since g has zero mean
    return GTable(g, g_tilde, fbar, phi)


def g_tilde_of_errors(gt: GTable, Y: np.ndarray) -> np.ndarray:
    """``g_tilde(y) = prod_{i : y_i != 0} g_tilde_i(y_i)`` for each row ``y`` of ``Y``."""
    Y = np.asarray(Y, dtype=np.int64)
    tab = gt.g_tilde_product_table
    if Y.shape[0] == 0:
        return np.zeros(0, dtype=complex)
    vals = tab[np.arange(Y.shape[1])[None, :], Y]
    return np.prod(vals, axis=1)


@dataclass(frozen=True)
class DqiCoefficients:
    """Degree bound ``l`` and weights ``w = (w_0, ..., w_l)``; need not be normalized."""

    w: np.ndarray

    def __post_init__(self):
        w = np.array(self.w, dtype=complex).reshape(-1)
        if w.size == 0:
            raise ValueError("need at least one coefficient")
        w.setflags(write=False)
        object.__setattr__(self, "w", w)

    @property
    def l(self) -> int:
        return self.w.size - 1

    @property
    def norm_sq(self) -> float:
        return float(np.vdot(self.w, self.w).real)

    @property
    def is_normalized(self) -> bool:
        return abs(self.norm_sq - 1.0) <= 1e-12

    def normalized(self) -> "DqiCoefficients":
        return DqiCoefficients(self.w / math.sqrt(self.norm_sq))


@dataclass(frozen=True, eq=False)
class AmplitudeVector:
    """Dense amplitudes over F_p^n in mixed-radix order."""

    amplitudes: np.ndarray
    p: int
    n: int

    def __post_init__(self):
        a = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if a.size != self.p**self.n:
            raise ValueError(f"expected {self.p ** self.n} amplitudes, got {a.size}")
        if not np.all(np.isfinite(a)):
            raise ValueError("amplitudes must be finite")
        object.__setattr__(self, "amplitudes", a)

    @property
    def norm_sq(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def normalized(self) -> "AmplitudeVector":
        nrm = self.norm_sq
        if nrm == 0.0:
            raise ZeroDivisionError("cannot normalize the zero state")
        return AmplitudeVector(self.amplitudes / math.sqrt(nrm), self.p, self.n)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def inner(self, other: "AmplitudeVector") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape((self.p,) * self.n)


def _check_dim(p: int, n: int, max_dim: int):
    if p**n > max_dim:
        raise MemoryError(f"p^n = {p ** n} exceeds the dense state budget {max_dim}")


def _constraint_values(inst: MaxLinSatInstance, gt: GTable) -> np.ndarray:
    """``(p^n, m)`` array of ``g_i(b_i . x)``."""
    X = all_assignments(inst.p, inst.n)
    Y = (X @ inst.B.data.T) % inst.p
    return gt.g[np.arange(inst.m)[None, :], Y]


def elementary_symmetric_values(values: np.ndarray, l: int) -> np.ndarray:
    """``e_k`` of each row of ``values`` for ``k = 0..l``, returned as ``(l+1, N)``.

    Uses the recurrence ``e_k <- e_k + v_i e_(k-1)`` over the columns.
    """
    values = np.asarray(values)
    N, m = values.shape
    if l > m:
        raise ValueError(f"degree l={l} exceeds the number of constraints m={m}")
    e = np.zeros((l + 1, N), dtype=values.dtype)
    e[0] = 1
    for i in range(m):
        v = values[:, i]
        for k in range(min(l, i + 1), 0, -1):
            e[k] = e[k] + v * e[k - 1]
    return e


def symmetric_poly_values(inst: MaxLinSatInstance, gt: GTable, l: int) -> np.ndarray:
    """``P^(k)`` for ``k = 0..l`` at every ``x``: the sum over ordered tuples of
    distinct constraint indices, i.e. ``k! e_k``.  Shape ``(l+1, p^n)``."""
    e = elementary_symmetric_values(_constraint_values(inst, gt), l)
    fact = np.array([math.factorial(k) for k in range(l + 1)], dtype=float)
    return e * fact[:, None]


def build_dqi_state(
    inst: MaxLinSatInstance, coeffs: DqiCoefficients, max_dim: int = DEFAULT_MAX_DIM
) -> AmplitudeVector:
    p, n, m, l = inst.p, inst.n, inst.m, coeffs.l
    if l > m:
        raise ValueError(f"degree l={l} exceeds m={m}")
    _check_dim(p, n, max_dim)
    gt = build_g_table(inst)
    e = elementary_symmetric_values(_constraint_values(inst, gt), l)
    scale = np.array([1.0 / math.sqrt(p ** (n - k) * math.comb(m, k)) for k in range(l + 1)])
    amps = (coeffs.w * scale) @ e
    return AmplitudeVector(amps, p, n)


def fourier_matrix(p: int, inverse: bool = False) -> np.ndarray:
    """``F[i, j] = omega^(i j) / sqrt(p)`` (or its adjoint)."""
    F = PrimeModulus(p).omega(np.outer(np.arange(p), np.arange(p))) / math.sqrt(p)
    return F.conj() if inverse else F


def fourier_state(state: AmplitudeVector, inverse: bool = False) -> AmplitudeVector:
    """Apply ``F^{(x) n}`` (or its inverse) one axis at a time."""
    F = fourier_matrix(state.p, inverse)
    t = state.tensor()
    for axis in range(state.n):
        t = np.moveaxis(np.tensordot(F, t, axes=([1], [axis])), 0, axis)
    return AmplitudeVector(t.reshape(-1), state.p, state.n)


def syndrome_indices(inst: MaxLinSatInstance, Y: np.ndarray) -> np.ndarray:
    """Mixed-radix index of ``B^T y`` for each row ``y`` of ``Y``."""
    Y = np.asarray(Y, dtype=np.int64).reshape(-1, inst.m)
    return vector_index((Y @ inst.B.data) % inst.p, inst.p)


def syndrome_histogram(inst: MaxLinSatInstance, Y: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Dense vector over F_p^n: ``h[s] = sum_{y in Y, B^T y = s} weights[y]``."""
    h = np.zeros(inst.p**inst.n, dtype=complex)
    if len(Y):
        np.add.at(h, syndrome_indices(inst, Y), weights)
    return h


def errors_up_to(m: int, p: int, l: int, budget: int = DEFAULT_ENUMERATION_BUDGET) -> list:
    """``[E_0, ..., E_l]``: all error strings of each weight."""
    total = sum(count_weight_vectors(m, p, k) for k in range(l + 1))
    if total > budget:
        raise BudgetExceeded(f"{total} error strings exceed the enumeration budget {budget}")
    return [weight_k_vectors(m, p, k) for k in range(l + 1)]


def syndrome_side_state(
    inst: MaxLinSatInstance,
    coeffs: DqiCoefficients,
    errors_by_weight: list | None = None,
    max_dim: int = DEFAULT_MAX_DIM,
) -> AmplitudeVector:
    """``sum_k w_k / sqrt(C(m,k)) sum_{y} g_tilde(y) |B^T y>`` with ``y`` ranging over
    ``errors_by_weight[k]`` (all weight-k strings by default)."""
    _check_dim(inst.p, inst.n, max_dim)
    if errors_by_weight is None:
        errors_by_weight = errors_up_to(inst.m, inst.p, coeffs.l)
    gt = build_g_table(inst)
    amps = np.zeros(inst.p**inst.n, dtype=complex)
    for k, Y in enumerate(errors_by_weight[: coeffs.l + 1]):
        if coeffs.w[k] == 0 or len(Y) == 0:
            continue
        h = syndrome_histogram(inst, Y, g_tilde_of_errors(gt, Y))
        amps += coeffs.w[k] / math.sqrt(math.comb(inst.m, k)) * h
    return AmplitudeVector(amps, inst.p, inst.n)


def gram_matrix(inst: MaxLinSatInstance, l: int, budget: int = DEFAULT_ENUMERATION_BUDGET) -> np.ndarray:
    """``M[k, k'] = <P~(k)|P~(k')>`` computed from syndrome collisions of weight-k
    and weight-k' error strings."""
    errors = errors_up_to(inst.m, inst.p, l, budget)
    gt = build_g_table(inst)
    H = np.array(
        [syndrome_histogram(inst, Y, g_tilde_of_errors(gt, Y)) / math.sqrt(math.comb(inst.m, k)) for k, Y in enumerate(errors)]
    )
    return H.conj() @ H.T


def write_state(state: AmplitudeVector, path: str | os.PathLike) -> None:
    """Binary dump: 8-byte magic, uint32 p, uint32 n (little endian), then
    ``p^n`` pairs of little-endian float64 ``(re, im)``."""
    with open(path, "wb") as fh:
        fh.write(STATE_MAGIC + struct.pack("<II", state.p, state.n))
        fh.write(state.amplitudes.astype("<c16").tobytes())


def read_state(path: str | os.PathLike) -> AmplitudeVector:
    with open(path, "rb") as fh:
        header = fh.read(16)
        if len(header) != 16 or header[:8] != STATE_MAGIC:
            raise ValueError("not a DQI state dump")
        p, n = struct.unpack("<II", header[8:])
        data = np.frombuffer(fh.read(), dtype="<c16")
    return AmplitudeVector(data.astype(complex), p, n)
