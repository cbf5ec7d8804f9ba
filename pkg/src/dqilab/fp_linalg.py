"""Arithmetic and linear algebra over a prime field F_p.

Vectors are plain 1-D integer numpy arrays with entries in ``{0, ..., p-1}``;
matrices are wrapped in :class:`FpMatrix`, which carries the modulus and keeps
its data read-only.  Every operation reduces mod p eagerly.

Assignments ``x = (x_1, ..., x_n)`` are indexed in mixed radix with ``x_1`` the
most significant digit, i.e. ``index(x) = sum_j x_j p^(n-j)``.  This is the
same order numpy uses for a C-contiguous array of shape ``(p,) * n``.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

DEFAULT_ENUMERATION_BUDGET = 10**8


class BudgetExceeded(RuntimeError):
    """An enumeration would visit more candidates than the configured cap."""


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p < 4:
        return True
    if p % 2 == 0:
        return False
    f = 3
    while f * f <= p:
        if p % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class PrimeModulus:
    """A prime p together with the phase ``omega_p = exp(2 pi i / p)``."""

    p: int

    def __post_init__(self):
        if not isinstance(self.p, (int, np.integer)) or not is_prime(int(self.p)):
            raise ValueError(f"modulus must be a prime integer, got {self.p!r}")
        object.__setattr__(self, "p", int(self.p))

    def omega(self, k=1):
        """``omega_p ** k``; accepts an int or an integer array."""
        if np.isscalar(k):
            return cmath.exp(2j * math.pi * (int(k) % self.p) / self.p)
        k = np.asarray(k) % self.p
        return np.exp(2j * np.pi * k / self.p)

    def __int__(self):
        return self.p


def as_fp_vector(x, p: int) -> np.ndarray:
    """Validate ``x`` as a vector over F_p and return it as an int64 array."""
    v = np.asarray(x, dtype=np.int64)
    if v.ndim != 1:
        raise ValueError("expected a 1-D vector")
    if np.any(v < 0) or np.any(v >= p):
        raise ValueError(f"vector entries must lie in [0, {p})")
    return v


@dataclass(frozen=True, eq=False)
class FpMatrix:
    """An ``m x n`` matrix over F_p (row-major, read-only)."""

    data: np.ndarray
    p: int
    _hash: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        PrimeModulus(self.p)
        a = np.array(self.data, dtype=np.int64, copy=True)
        if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
            raise ValueError("matrix must be 2-D with m, n >= 1")
        if np.any(a < 0) or np.any(a >= self.p):
            raise ValueError(f"matrix entries must lie in [0, {self.p})")
        a.setflags(write=False)
        object.__setattr__(self, "data", a)
        object.__setattr__(self, "p", int(self.p))
        object.__setattr__(self, "_hash", hash((self.p, a.shape, a.tobytes())))

    @classmethod
    def from_rows(cls, rows, p: int) -> "FpMatrix":
        return cls(np.asarray(rows, dtype=np.int64) % p, p)

    @classmethod
    def identity(cls, n: int, p: int) -> "FpMatrix":
        return cls(np.eye(n, dtype=np.int64), p)

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self):
        return self.data.shape

    @property
    def T(self) -> "FpMatrix":
        return FpMatrix(self.data.T, self.p)

    def __eq__(self, other):
        if not isinstance(other, FpMatrix):
            return NotImplemented
        return self.p == other.p and np.array_equal(self.data, other.data)

    def __hash__(self):
        return self._hash


def mat_vec(B: FpMatrix, x) -> np.ndarray:
    """``B x mod p``."""
    x = as_fp_vector(x, B.p)
    if x.shape[0] != B.cols:
        raise ValueError(f"dimension mismatch: B has {B.cols} columns, x has length {x.shape[0]}")
    return (B.data @ x) % B.p


def transpose_mat_vec(B: FpMatrix, y) -> np.ndarray:
    """``B^T y mod p`` (the syndrome of ``y``)."""
    y = as_fp_vector(y, B.p)
    if y.shape[0] != B.rows:
        raise ValueError(f"dimension mismatch: B has {B.rows} rows, y has length {y.shape[0]}")
    return (y @ B.data) % B.p


def hamming_weight(v) -> int:
    return int(np.count_nonzero(np.asarray(v)))


def row_degrees(B: FpMatrix) -> np.ndarray:
    """Number of nonzero entries in each row of ``B``."""
    return np.count_nonzero(B.data, axis=1)


def all_assignments(p: int, n: int) -> np.ndarray:
    """Every vector of F_p^n as rows of a ``(p**n, n)`` array, in mixed-radix order."""
    idx = np.arange(p**n, dtype=np.int64)
    out = np.empty((p**n, n), dtype=np.int64)
    for j in range(n - 1, -1, -1):
        out[:, j] = idx % p
        idx //= p
    return out


def vector_index(v, p: int) -> np.ndarray:
    """Mixed-radix index of each row of ``v`` (first coordinate most significant)."""
    v = np.asarray(v, dtype=np.int64)
    n = v.shape[-1]
    radix = p ** np.arange(n - 1, -1, -1, dtype=np.int64)
    return v @ radix


def count_weight_vectors(m: int, p: int, k: int) -> int:
    return math.comb(m, k) * (p - 1) ** k


def weight_k_vectors(m: int, p: int, k: int) -> np.ndarray:
    """All vectors of F_p^m with Hamming weight exactly ``k``, in lexicographic order."""
    total = count_weight_vectors(m, p, k)
    out = np.zeros((total, m), dtype=np.int64)
    if k == 0:
        return out
    values = np.array(list(itertools.product(range(1, p), repeat=k)), dtype=np.int64)
    row = 0
    for support in itertools.combinations(range(m), k):
        out[row : row + len(values), support] = values
        row += len(values)
    # combinations x product order is already lexicographic in reverse on the
    # support; sort explicitly so callers can rely on it
    order = np.lexsort(out.T[::-1])
    return out[order]


def rank_mod_p(M, p: int) -> int:
    return int(batched_rank_mod_p(np.asarray(M, dtype=np.int64)[None, :, :], p)[0])


def batched_rank_mod_p(stack: np.ndarray, p: int) -> np.ndarray:
    """Rank over F_p of each matrix in a ``(N, r, c)`` stack, by vectorized elimination."""
    a = np.array(stack, dtype=np.int64) % p
    N, r, c = a.shape
    inv = np.zeros(p, dtype=np.int64)
    for u in range(1, p):
        inv[u] = pow(u, p - 2, p)
    rank = np.zeros(N, dtype=np.int64)
    rows = np.arange(N)
    for col in range(c):
        if np.all(rank >= r):
            break
        active = rank < r
        # pivot: first row at or below current rank with a nonzero entry in this column
        below = np.arange(r)[None, :] >= rank[:, None]
        cand = (a[:, :, col] != 0) & below & active[:, None]
        has = cand.any(axis=1)
        if not has.any():
            continue
        piv = np.argmax(cand, axis=1)
        sel = rows[has]
        pr, rk = piv[has], rank[has]
        # swap pivot row into position `rank`
        tmp = a[sel, rk, :].copy()
        a[sel, rk, :] = a[sel, pr, :]
        a[sel, pr, :] = tmp
        pivot_row = (a[sel, rk, :] * inv[a[sel, rk, col]][:, None]) % p
        a[sel, rk, :] = pivot_row
        factors = a[sel, :, col].copy()
        factors[np.arange(len(sel)), rk] = 0
        a[sel] = (a[sel] - factors[:, :, None] * pivot_row[:, None, :]) % p
        rank[sel] += 1
    return rank


def nullspace_mod_p(M, p: int) -> np.ndarray:
    """Basis (as rows) of ``{x : M x = 0}`` over F_p."""
    a = np.array(M, dtype=np.int64) % p
    r, c = a.shape
    pivots = []
    row = 0
    for col in range(c):
        nz = np.nonzero(a[row:, col])[0] if row < r else []
        if len(nz) == 0:
            continue
        pr = row + nz[0]
        a[[row, pr]] = a[[pr, row]]
        a[row] = (a[row] * pow(int(a[row, col]), p - 2, p)) % p
        for other in range(r):
            if other != row and a[other, col]:
                a[other] = (a[other] - a[other, col] * a[row]) % p
        pivots.append(col)
        row += 1
        if row == r:
            break
    free = [j for j in range(c) if j not in pivots]
    basis = np.zeros((len(free), c), dtype=np.int64)
    for b, fcol in enumerate(free):
        basis[b, fcol] = 1
        for prow, pcol in enumerate(pivots):
            basis[b, pcol] = (-a[prow, fcol]) % p
    return basis


@dataclass(frozen=True)
class DistanceCheck:
    """Outcome of :func:`check_distance_condition`.

    ``holds`` is ``None`` when the enumeration budget ran out before a verdict.
    ``witness`` is a minimum-weight nonzero ``v`` with ``B^T v = 0`` when found.
    """

    holds: bool | None
    witness: np.ndarray | None
    max_weight: int
    candidates: int

    def __bool__(self):
        return self.holds is True

    @property
    def undecided(self) -> bool:
        return self.holds is None


def _distance_cost(m: int, p: int, wmax: int, method: str) -> int:
    if method == "vectors":
        return sum(count_weight_vectors(m, p, w) for w in range(1, wmax + 1))
    return sum(math.comb(m, w) for w in range(1, wmax + 1))


def check_distance_condition(
    B: FpMatrix, l: int, budget: int = DEFAULT_ENUMERATION_BUDGET, method: str = "auto"
) -> DistanceCheck:
    """Decide ``2l + 1 < d_perp`` for the code ``ker(B^T)``.

    ``method="vectors"`` enumerates every candidate of weight ``1 .. 2l+1``;
    ``method="subsets"`` instead tests each row subset of that size for linear
    dependence, which avoids the ``(p-1)^w`` factor.  ``"auto"`` picks the
    cheaper one.  Exceeding ``budget`` yields an undecided result.
    """
    if l < 0:
        raise ValueError("l must be nonnegative")
    m, p = B.rows, B.p
    wmax = min(2 * l + 1, m)
    if method == "auto":
        method = "vectors" if _distance_cost(m, p, wmax, "vectors") <= _distance_cost(m, p, wmax, "subsets") else "subsets"
    if method not in ("vectors", "subsets"):
        raise ValueError(f"unknown method {method!r}")
    cost = _distance_cost(m, p, wmax, method)
    if cost > budget:
        return DistanceCheck(None, None, 2 * l + 1, cost)
    for w in range(1, wmax + 1):
        witness = (_dependent_vectors if method == "vectors" else _dependent_subsets)(B, w)
        if witness is not None:
            return DistanceCheck(False, witness, 2 * l + 1, cost)
    return DistanceCheck(True, None, 2 * l + 1, cost)


def _dependent_vectors(B: FpMatrix, w: int, chunk: int = 1 << 16):
    m, p = B.rows, B.p
    # the kernel is closed under scaling, so fix the first nonzero value to 1
    tails = list(itertools.product(range(1, p), repeat=w - 1))
    tails = np.array(tails, dtype=np.int64).reshape(len(tails), w - 1)
    vals = np.hstack([np.ones((len(tails), 1), dtype=np.int64), tails])
    batch = []
    for support in itertools.combinations(range(m), w):
        batch.append(support)
        if len(batch) * len(vals) >= chunk:
            hit = _scan_supports(B, batch, vals)
            if hit is not None:
                return hit
            batch = []
    if batch:
        return _scan_supports(B, batch, vals)
    return None


def _scan_supports(B: FpMatrix, supports, vals):
    sup = np.asarray(supports, dtype=np.int64)  # (S, w)
    rows = B.data[sup]  # (S, w, n)
    syn = np.einsum("vw,swn->svn", vals, rows) % B.p
    zero = ~syn.any(axis=2)
    if not zero.any():
        return None
    s, v = map(int, np.argwhere(zero)[0])
    out = np.zeros(B.rows, dtype=np.int64)
    out[sup[s]] = vals[v]
    return out


def _dependent_subsets(B: FpMatrix, w: int, chunk: int = 1 << 15):
    p = B.p
    it = itertools.combinations(range(B.rows), w)
    while True:
        sup = np.array(list(itertools.islice(it, chunk)), dtype=np.int64)
        if sup.size == 0:
            return None
        sup = sup.reshape(-1, w)
        ranks = batched_rank_mod_p(B.data[sup], p)
        bad = np.nonzero(ranks < w)[0]
        if len(bad):
            support = sup[bad[0]]
            # left null vector of the dependent rows; minimality of w forces full support
            coeffs = nullspace_mod_p(B.data[support].T, p)[0]
            out = np.zeros(B.rows, dtype=np.int64)
            out[support] = coeffs
            first = coeffs[np.nonzero(coeffs)[0][0]]
            return (out * pow(int(first), p - 2, p)) % p
