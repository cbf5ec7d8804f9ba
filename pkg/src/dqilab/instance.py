"""Max-LinSAT instances: constraints ``(B x)_i in F_i`` over F_p.

Includes the two generator families used throughout the package (optimal
polynomial intersection and sparse Max-XORSAT) and a plaintext file format::

    p m n r
    <m lines: n residues, the rows of B>
    <m lines: r residues, the sets F_i>
"""

from __future__ import annotations

import io
import math
import os
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .fp_linalg import FpMatrix, all_assignments, as_fp_vector, mat_vec


@dataclass(frozen=True, eq=False)
class MaxLinSatInstance:
    B: FpMatrix
    sets: tuple

    def __post_init__(self):
        sets = tuple(tuple(sorted(int(v) for v in s)) for s in self.sets)
        object.__setattr__(self, "sets", sets)
        p, m = self.B.p, self.B.rows
        if m <= self.B.cols:
            raise ValueError(f"need more constraints than variables, got m={m}, n={self.B.cols}")
        if len(sets) != m:
            raise ValueError(f"need one constraint set per row: got {len(sets)} sets for {m} rows")
        sizes = {len(s) for s in sets}
        if len(sizes) != 1:
            raise ValueError("all constraint sets must have the same cardinality r")
        r = sizes.pop()
        if not 1 <= r <= p - 1:
            raise ValueError(f"set size r={r} must satisfy 1 <= r <= p-1")
        for s in sets:
            if len(set(s)) != len(s) or any(not 0 <= v < p for v in s):
                raise ValueError(f"invalid constraint set {s} for p={p}")

    @property
    def p(self) -> int:
        return self.B.p

    @property
    def m(self) -> int:
        return self.B.rows

    @property
    def n(self) -> int:
        return self.B.cols

    @property
    def r(self) -> int:
        return len(self.sets[0])

    def indicator_table(self) -> np.ndarray:
        """``(m, p)`` 0/1 array with entry ``[i, v] = 1`` iff ``v in F_i``."""
        t = np.zeros((self.m, self.p), dtype=np.int64)
        for i, s in enumerate(self.sets):
            t[i, list(s)] = 1
        return t

    def with_sets(self, sets) -> "MaxLinSatInstance":
        return MaxLinSatInstance(self.B, tuple(sets))

    def resample_sets(self, seed) -> "MaxLinSatInstance":
        """Same matrix, fresh uniformly random r-subsets."""
        return self.with_sets(random_sets(self.p, self.m, self.r, seed))

    def all_scores(self) -> np.ndarray:
        """``score(x)`` for every ``x`` in F_p^n, in mixed-radix order."""
        X = all_assignments(self.p, self.n)
        return self.scores_of(X)

    def scores_of(self, X) -> np.ndarray:
        """Scores of each row of a ``(N, n)`` array of assignments."""
        Y = (np.asarray(X, dtype=np.int64) @ self.B.data.T) % self.p
        ind = self.indicator_table()
        return ind[np.arange(self.m)[None, :], Y].sum(axis=1)

    def __eq__(self, other):
        if not isinstance(other, MaxLinSatInstance):
            return NotImplemented
        return self.B == other.B and self.sets == other.sets

    def __hash__(self):
        return hash((self.B, self.sets))


def score(inst: MaxLinSatInstance, x) -> int:
    """Number of satisfied constraints."""
    y = mat_vec(inst.B, x)
    return sum(1 for yi, s in zip(y, inst.sets) if int(yi) in s)


def objective(inst: MaxLinSatInstance, x) -> int:
    """``f(x) = sum_i f_i((Bx)_i)`` with ``f_i = +1`` on ``F_i`` and ``-1`` elsewhere."""
    return 2 * score(inst, x) - inst.m


def random_sets(p: int, m: int, r: int, seed) -> tuple:
    rng = np.random.default_rng(seed)
    return tuple(tuple(sorted(int(v) for v in rng.choice(p, size=r, replace=False))) for _ in range(m))


def make_opi(p: int, n: int, r: int | None = None, sets=None, seed=0) -> MaxLinSatInstance:
    """Optimal polynomial intersection: ``B[i-1, j-1] = i^(j-1) mod p`` for ``i = 1..p-1``.

    Without explicit ``sets`` each ``F_i`` is a seeded uniformly random
    ``r``-subset; ``r`` defaults to ``p // 2``.
    """
    if not 1 <= n < p:
        raise ValueError(f"OPI needs 1 <= n < p, got n={n}, p={p}")
    rows = [[pow(i, j, p) for j in range(n)] for i in range(1, p)]
    B = FpMatrix(np.array(rows, dtype=np.int64), p)
    if sets is None:
        sets = random_sets(p, p - 1, r if r is not None else p // 2, seed)
    return MaxLinSatInstance(B, tuple(sets))


def make_random_instance(p: int, m: int, n: int, r: int, seed) -> MaxLinSatInstance:
    """Uniformly random ``B`` and uniformly random r-subsets."""
    rng = np.random.default_rng(seed)
    B = FpMatrix(rng.integers(0, p, size=(m, n)), p)
    return MaxLinSatInstance(B, random_sets(p, m, r, rng))


@dataclass(frozen=True)
class DegreeDistribution:
    """Fractions ``kappa_j`` of constraints having exactly ``j`` nonzero entries."""

    pairs: tuple

    def __post_init__(self):
        pairs = tuple(sorted((int(j), float(k)) for j, k in self.pairs))
        if not pairs:
            raise ValueError("empty degree distribution")
        for j, k in pairs:
            if j < 1 or not 0.0 <= k <= 1.0:
                raise ValueError(f"bad degree pair ({j}, {k})")
        if len({j for j, _ in pairs}) != len(pairs):
            raise ValueError("duplicate degree")
        if abs(math.fsum(k for _, k in pairs) - 1.0) > 1e-12:
            raise ValueError("degree fractions must sum to 1")
        object.__setattr__(self, "pairs", pairs)

    @classmethod
    def parse(cls, text: str) -> "DegreeDistribution":
        """Parse ``"3:0.5,4:0.5"``."""
        pairs = []
        for item in text.split(","):
            j, k = item.split(":")
            pairs.append((int(j), float(Fraction(k))))
        return cls(tuple(pairs))

    def row_counts(self, m: int) -> dict:
        """Largest-remainder rounding of ``kappa_j * m``; ties go to the smaller degree."""
        exact = [(j, Fraction(k).limit_denominator(10**12) * m) for j, k in self.pairs]
        counts = {j: math.floor(x) for j, x in exact}
        left = m - sum(counts.values())
        order = sorted(exact, key=lambda jx: (-(jx[1] - math.floor(jx[1])), jx[0]))
        for j, _ in order[:left]:
            counts[j] += 1
        return counts

    def tau1(self, epsilon: float) -> float:
        return math.fsum(k * (1.0 - epsilon) ** j for j, k in self.pairs)

    def tau_inf(self, epsilon: float) -> float:
        return max((1.0 - epsilon) ** j for j, k in self.pairs if k > 0)


def make_xorsat(m: int, n: int, dist: DegreeDistribution, rhs_mode="uniform", seed=0) -> MaxLinSatInstance:
    """Sparse Max-XORSAT over F_2 with row degrees drawn from ``dist``.

    ``rhs_mode`` is ``"uniform"`` (each ``v_i`` a fair coin), ``"zero"``, or an
    explicit length-``m`` 0/1 sequence.  Rows are shuffled so degrees are not
    grouped.
    """
    counts = dist.row_counts(m)
    for j, c in counts.items():
        if c and j > n:
            raise ValueError(f"degree {j} exceeds n={n}")
    rng = np.random.default_rng(seed)
    degrees = np.array([j for j, c in sorted(counts.items()) for _ in range(c)], dtype=np.int64)
    rng.shuffle(degrees)
    B = np.zeros((m, n), dtype=np.int64)
    for i, j in enumerate(degrees):
        B[i, rng.choice(n, size=int(j), replace=False)] = 1
    if isinstance(rhs_mode, str):
        if rhs_mode == "uniform":
            rhs = rng.integers(0, 2, size=m)
        elif rhs_mode == "zero":
            rhs = np.zeros(m, dtype=np.int64)
        else:
            raise ValueError(f"unknown rhs_mode {rhs_mode!r}")
    else:
        rhs = as_fp_vector(rhs_mode, 2)
        if len(rhs) != m:
            raise ValueError("explicit right-hand side must have length m")
    return MaxLinSatInstance(FpMatrix(B, 2), tuple((int(v),) for v in rhs))


def format_instance(inst: MaxLinSatInstance) -> str:
    buf = io.StringIO()
    buf.write(f"{inst.p} {inst.m} {inst.n} {inst.r}\n")
    for row in inst.B.data:
        buf.write(" ".join(str(int(v)) for v in row) + "\n")
    for s in inst.sets:
        buf.write(" ".join(str(v) for v in s) + "\n")
    return buf.getvalue()


def parse_instance(text: str) -> MaxLinSatInstance:
    lines = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines or len(lines[0]) != 4:
        raise ValueError("instance header must be 'p m n r'")
    p, m, n, r = map(int, lines[0])
    if len(lines) != 1 + 2 * m:
        raise ValueError(f"expected {1 + 2 * m} non-empty lines, found {len(lines)}")
    rows = [list(map(int, ln)) for ln in lines[1 : m + 1]]
    if any(len(row) != n for row in rows):
        raise ValueError(f"every matrix row needs {n} entries")
    sets = [tuple(map(int, ln)) for ln in lines[m + 1 :]]
    if any(len(s) != r for s in sets):
        raise ValueError(f"every constraint set needs {r} entries")
    return MaxLinSatInstance(FpMatrix(np.array(rows, dtype=np.int64), p), tuple(sets))


def write_instance(inst: MaxLinSatInstance, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(format_instance(inst))


def read_instance(path: str | os.PathLike) -> MaxLinSatInstance:
    with open(path, encoding="ascii") as fh:
        return parse_instance(fh.read())
