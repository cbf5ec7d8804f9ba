"""Brute-force oracles for the counting identities behind the noisy-DQI formulas.

Every identity is checked two ways: a closed form and a direct enumeration.
Both are evaluated in exact rational arithmetic (``fractions.Fraction``), so
equality is exact.  Sums of p-th roots of unity are reduced exactly via
residue counting: ``sum_e c_e omega^e`` is rational iff ``c_1 = ... = c_(p-1)``,
and then equals ``c_0 - c_1``.

The row-damping factor computed by :func:`row_character_damping` is reused by
:mod:`dqilab.decoder_lab` in place of summing over all ``p^n`` shifts.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .dqi_state import AmplitudeVector
from .fp_linalg import FpMatrix, all_assignments, as_fp_vector, count_weight_vectors, is_prime, weight_k_vectors

ENUMERATION_CAP = 200_000
FULL_SPACE_CAP = 10**7
DENSITY_DIM_CAP = 81


def _check_prime(p: int):
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")


def _exact_root_sum(counts, p: int) -> Fraction:
    """Exact value of ``sum_e counts[e] omega^e`` when it is rational."""
    counts = [int(c) for c in counts]
    if len(set(counts[1:])) > 1:
        raise ArithmeticError(f"root-of-unity sum with counts {counts} is not rational")
    return Fraction(counts[0] - (counts[1] if p > 1 else 0))


# -- inner products with random fixed-weight vectors -------------------------


def p_of_t_formula(p: int, t: int) -> Fraction:
    """``1/p + (-1/(p-1))^t (p-1)/p``."""
    return Fraction(1, p) + Fraction(-1, p - 1) ** t * Fraction(p - 1, p)


def _zero_inner_product_fraction(a: np.ndarray, p: int, t: int) -> Fraction:
    V = weight_k_vectors(len(a), p, t)
    if len(V) == 0:
        raise ValueError("no vectors of that weight")
    hits = int(np.count_nonzero((V @ a) % p == 0))
    return Fraction(hits, len(V))


def p_of_t(p: int, a, t: int) -> tuple:
    """Probability that ``<a, v> = 0`` for ``v`` uniform among weight-``t`` vectors.

    ``a`` must have only nonzero entries.  Returns ``(formula, enumerated)``.
    """
    _check_prime(p)
    a = as_fp_vector(a, p)
    if np.any(a == 0):
        raise ValueError("all entries of a must be nonzero")
    if not 0 <= t <= len(a):
        raise ValueError(f"need 0 <= t <= {len(a)}")
    if count_weight_vectors(len(a), p, t) > ENUMERATION_CAP:
        raise OverflowError("weight class exceeds the enumeration cap")
    return p_of_t_formula(p, t), _zero_inner_product_fraction(a, p, t)


def q_of_t_mixture(b_row, p: int, t: int) -> Fraction:
    """``Q(t)`` for the row ``b``: the support overlap ``s`` of a uniform weight-``t``
    vector with ``supp(b)`` is hypergeometric, and given ``s`` the inner product
    vanishes with probability ``P(s)``."""
    b = np.asarray(b_row) % p
    n, L = len(b), int(np.count_nonzero(b))
    total = math.comb(n, t)
    acc = Fraction(0)
    for s in range(max(0, t - (n - L)), min(t, L) + 1):
        acc += Fraction(math.comb(L, s) * math.comb(n - L, t - s), total) * p_of_t_formula(p, s)
    return acc


def q_table_enumerated(b_row, p: int) -> list:
    """``[Q(0), ..., Q(n)]`` by visiting every vector of F_p^n once."""
    b = np.asarray(b_row, dtype=np.int64) % p
    n = len(b)
    if p**n > FULL_SPACE_CAP:
        raise OverflowError("F_p^n too large to enumerate")
    hits = np.zeros(n + 1, dtype=np.int64)
    if n == 0:
        return [Fraction(1)]
    head = all_assignments(p, n - 1).astype(np.int64)
    head_w = np.count_nonzero(head, axis=1)
    head_dot = (head @ b[:-1]) % p
    for last in range(p):
        w = head_w + (last != 0)
        zero = (head_dot + last * b[-1]) % p == 0
        hits += np.bincount(w[zero], minlength=n + 1)
    return [Fraction(int(hits[t]), count_weight_vectors(n, p, t)) for t in range(n + 1)]


def q_of_t(b_row, p: int, t: int, method: str = "auto") -> Fraction:
    """Probability that ``<u, b> = 0`` for ``u`` uniform among weight-``t`` vectors of F_p^n."""
    b = np.asarray(b_row) % p
    n = len(b)
    if not 0 <= t <= n:
        raise ValueError(f"need 0 <= t <= {n}")
    if method == "auto":
        method = "enumerate" if count_weight_vectors(n, p, t) <= ENUMERATION_CAP else "mixture"
    if method == "mixture":
        return q_of_t_mixture(b, p, t)
    if method == "enumerate":
        if count_weight_vectors(n, p, t) > ENUMERATION_CAP:
            raise OverflowError("weight class exceeds the enumeration cap")
        return _zero_inner_product_fraction(b.astype(np.int64), p, t)
    raise ValueError(f"unknown method {method!r}")


def _shift_weights(p: int, n: int, eps):
    """Per-weight probability of each individual shift ``alpha`` with ``|alpha| = t``."""
    if isinstance(eps, Fraction):
        lo, hi = eps / p, 1 - (p - 1) * eps / p
    else:
        lo, hi = float(eps) / p, 1.0 - (p - 1) * float(eps) / p
    return [lo**t * hi ** (n - t) for t in range(n + 1)]


def row_character_damping(b_row, p: int, eps, q_values=None):
    """``sum_alpha Pr[alpha] omega^(a <b, alpha>)`` for any ``a != 0``, grouped by ``|alpha|``.

    Exact (a Fraction) when ``eps`` is a Fraction; otherwise a float.  Equals
    ``(1 - eps)^|b|``.
    """
    b = np.asarray(b_row) % p
    n = len(b)
    if q_values is None:
        q_values = [q_of_t_mixture(b, p, t) for t in range(n + 1)]
    exact = isinstance(eps, Fraction)
    wt = _shift_weights(p, n, eps)
    terms = []
    for t in range(n + 1):
        q = q_values[t] if exact else float(q_values[t])
        avg = (p * q - 1) / (p - 1)
        terms.append(math.comb(n, t) * (p - 1) ** t * wt[t] * avg)
    return sum(terms, Fraction(0)) if exact else math.fsum(terms)


def q_reduction_check(B: FpMatrix, noise, i: int, method: str = "auto") -> tuple:
    """``(lhs, rhs)``: the weight-grouped character sum for row ``i`` and ``(1 - eps)^|b_i|``."""
    b = B.data[i]
    eps = noise.epsilon if hasattr(noise, "epsilon") else noise
    p, n = B.p, B.cols
    if method == "auto":
        method = "enumerate" if p**n <= FULL_SPACE_CAP and n <= 10 else "mixture"
    if method == "enumerate":
        q_values = q_table_enumerated(b, p)
    else:
        q_values = [q_of_t_mixture(b, p, t) for t in range(n + 1)]
    lhs = row_character_damping(b, p, eps, q_values)
    L = int(np.count_nonzero(b))
    rhs = (1 - eps) ** L if isinstance(eps, Fraction) else (1.0 - float(eps)) ** L
    return lhs, rhs


# -- character sums over random r-subsets ------------------------------------


def subset_expectation_enumerated(p: int, r: int, y) -> Fraction:
    """``E_F sum_{x in F^k} omega^(x . y)`` over all r-subsets ``F`` of F_p."""
    y = [int(v) % p for v in y]
    counts = [0] * p
    for S in itertools.combinations(range(p), r):
        for x in itertools.product(S, repeat=len(y)):
            counts[sum(xi * yi for xi, yi in zip(x, y)) % p] += 1
    return _exact_root_sum(counts, p) / math.comb(p, r)


def subset_expectation_closed(p: int, r: int, y):
    """Closed form, or ``None`` when more than three nonzero entries sum to zero."""
    y = [int(v) % p for v in y]
    zeros = sum(1 for v in y if v == 0)
    nz = [v for v in y if v != 0]
    scale = Fraction(r) ** zeros
    if sum(nz) % p != 0:
        return Fraction(0)
    if not nz:
        return scale
    if len(nz) == 2:
        return scale * (r - Fraction(r * (r - 1), p - 1))
    if len(nz) == 3:  # p > 2 here: three nonzero bits never sum to 0 mod 2
        return scale * Fraction(r * (p - r) * (p - 2 * r), (p - 1) * (p - 2))
    return None


def subset_expectation(p: int, r: int, y) -> tuple:
    """``(closed, enumerated)`` for ``E_F sum_{x in F^k} omega^(x . y)``."""
    _check_prime(p)
    if not 1 <= r <= p - 1:
        raise ValueError(f"need 1 <= r <= p-1, got r={r}")
    if not 1 <= len(y) <= 3:
        raise ValueError("y must have length 1, 2 or 3")
    return subset_expectation_closed(p, r, y), subset_expectation_enumerated(p, r, y)


# -- density-matrix channel --------------------------------------------------


def _weyl_ops(p: int):
    omega = np.exp(2j * np.pi * np.arange(p) / p)
    X = np.roll(np.eye(p), 1, axis=0)  # X|j> = |j+1>
    Z = np.diag(omega)
    return [np.linalg.matrix_power(X, a) @ np.linalg.matrix_power(Z, b) for a in range(p) for b in range(p)]


def density_matrix_oracle(state: AmplitudeVector, noise) -> np.ndarray:
    """Diagonal of ``E^{(x) n}(|psi><psi|)`` computed on the full density matrix.

    Each qudit's channel is written as ``(1 - eps) rho + eps/p^2 sum_W W rho W^dagger``
    over the ``p^2`` Weyl operators ``X^a Z^b``, which replaces that qudit by the
    maximally mixed state.
    """
    p, n = state.p, state.n
    dim = p**n
    if dim > DENSITY_DIM_CAP:
        raise MemoryError(f"p^n = {dim} exceeds the density-matrix cap {DENSITY_DIM_CAP}")
    eps = float(noise.epsilon if hasattr(noise, "epsilon") else noise)
    psi = state.amplitudes
    rho = np.outer(psi, psi.conj())
    weyl = _weyl_ops(p)
    for j in range(n):
        left, right = np.eye(p**j), np.eye(p ** (n - j - 1))
        twirl = np.zeros_like(rho)
        for W in weyl:
            full = np.kron(np.kron(left, W), right)
            twirl += full @ rho @ full.conj().T
        rho = (1 - eps) * rho + eps / p**2 * twirl
    return np.real(np.diag(rho)).copy()


# -- suite -------------------------------------------------------------------

SMALL_PRIMES = (2, 3, 5, 7)


@dataclass(frozen=True)
class LemmaResult:
    name: str
    cases: int
    failures: int
    first_failure: str = ""

    @property
    def passed(self) -> bool:
        return self.failures == 0 and self.cases > 0


class _Tally:
    def __init__(self, name):
        self.name, self.cases, self.failures, self.first = name, 0, 0, ""

    def check(self, ok: bool, detail):
        self.cases += 1
        if not ok:
            self.failures += 1
            if not self.first:
                self.first = detail() if callable(detail) else str(detail)

    def result(self) -> LemmaResult:
        return LemmaResult(self.name, self.cases, self.failures, self.first)


LEMMA_NAMES = (
    "inner-product-zero-probability",
    "inner-product-recurrence",
    "row-character-damping",
    "subset-sum-nonzero-vanishes",
    "subset-pair-sum-zero",
    "subset-triple-sum-zero",
)


def lemma_suite(primes=SMALL_PRIMES, max_t: int = 6, max_n: int = 8, seed: int = 0, damping=None) -> list:
    """Exhaustive exact checks of all identities; one :class:`LemmaResult` per name.

    ``damping`` overrides the closed form ``(1 - eps)^|b|`` that the character sum
    is compared with; it exists so the suite can be shown to catch a wrong formula.
    """
    rng = np.random.default_rng(seed)
    inner, recur, damp = _Tally(LEMMA_NAMES[0]), _Tally(LEMMA_NAMES[1]), _Tally(LEMMA_NAMES[2])
    nonzero, pair, triple = _Tally(LEMMA_NAMES[3]), _Tally(LEMMA_NAMES[4]), _Tally(LEMMA_NAMES[5])
    eps_grid = (Fraction(0), Fraction(1, 4), Fraction(1, 3), Fraction(1, 2), Fraction(1))
    for p in primes:
        for t in range(max_t):
            recur.check(p_of_t_formula(p, t + 1) == (1 - p_of_t_formula(p, t)) / (p - 1), f"p={p} t={t}")
        for length in range(1, max_t + 1):
            vectors = [np.ones(length, dtype=np.int64), rng.integers(1, p, size=length)]
            for a in vectors:
                for t in range(length + 1):
                    f, e = p_of_t(p, a, t)
                    inner.check(f == e, lambda: f"p={p} a={a.tolist()} t={t}: {f} vs {e}")
        for n in range(1, max_n + 1):
            for L in range(n + 1):
                b = np.zeros(n, dtype=np.int64)
                b[rng.choice(n, size=L, replace=False)] = rng.integers(1, p, size=L)
                q_values = q_table_enumerated(b, p)
                for eps in eps_grid:
                    lhs = row_character_damping(b, p, eps, q_values)
                    rhs = damping(eps, L) if damping is not None else (1 - eps) ** L
                    damp.check(lhs == rhs, lambda: f"p={p} b={b.tolist()} eps={eps}: {lhs} vs {rhs}")
        for r in range(1, p):
            for k in (1, 2, 3):
                for y in itertools.product(range(p), repeat=k):
                    if any(v == 0 for v in y):
                        continue
                    if sum(y) % p != 0:
                        closed, enum = subset_expectation(p, r, y)
                        nonzero.check(closed == enum == 0, lambda: f"p={p} r={r} y={y}: {enum}")
                    elif k == 2:
                        closed, enum = subset_expectation(p, r, y)
                        pair.check(closed == enum, lambda: f"p={p} r={r} y={y}: {closed} vs {enum}")
                    elif k == 3 and p > 2:
                        closed, enum = subset_expectation(p, r, y)
                        triple.check(closed == enum, lambda: f"p={p} r={r} y={y}: {closed} vs {enum}")
    return [x.result() for x in (inner, recur, damp, nonzero, pair, triple)]
