import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dqilab.fp_linalg import FpMatrix
from dqilab.noise import NoiseModel, noisy_output_distribution
from dqilab.oracles import (
    LEMMA_NAMES,
    density_matrix_oracle,
    lemma_suite,
    p_of_t,
    p_of_t_formula,
    q_of_t,
    q_of_t_mixture,
    q_reduction_check,
    q_table_enumerated,
    row_character_damping,
    subset_expectation,
    subset_expectation_closed,
)
from dqilab.verify import random_state


def _zero_fraction_brute(p, a, t):
    """Share of weight-t supports/values v on len(a) coordinates with a.v = 0."""
    hits = total = 0
    for v in itertools.product(range(p), repeat=len(a)):
        if sum(x != 0 for x in v) != t:
            continue
        total += 1
        hits += sum(x * y for x, y in zip(a, v)) % p == 0
    return Fraction(hits, total)


def test_zero_probability_examples():
    assert p_of_t_formula(3, 2) == Fraction(1, 2)
    assert p_of_t_formula(2, 1) == 0
    assert p_of_t_formula(5, 0) == 1
    assert p_of_t(3, [1, 2, 1], 2) == (Fraction(1, 2), Fraction(1, 2))


@given(st.sampled_from([2, 3, 5]), st.lists(st.integers(1, 4), min_size=1, max_size=4), st.data())
@settings(max_examples=40)
def test_zero_probability_matches_brute_force(p, raw, data):
    a = [x % p or 1 for x in raw]
    t = data.draw(st.integers(0, len(a)))
    formula, enumerated = p_of_t(p, a, t)
    assert formula == enumerated == _zero_fraction_brute(p, a, t)


@given(st.sampled_from([2, 3, 5, 7]), st.integers(0, 8))
def test_zero_probability_recurrence(p, t):
    assert p_of_t_formula(p, t + 1) == (1 - p_of_t_formula(p, t)) / (p - 1)


def test_damping_example_ternary():
    B = FpMatrix([[1, 2, 0, 0], [1, 1, 1, 1]], 3)
    lhs, rhs = q_reduction_check(B, Fraction(3, 10), 0)
    assert lhs == rhs == Fraction(49, 100)
    lhs, rhs = q_reduction_check(B, NoiseModel(0.3), 0)
    assert lhs == pytest.approx(0.49, abs=1e-12) and rhs == pytest.approx(0.49, abs=1e-12)


@given(st.sampled_from([2, 3, 5]), st.integers(1, 5), st.integers(0, 9999), st.fractions(0, 1, max_denominator=12))
@settings(max_examples=40, deadline=None)
def test_damping_is_survival_power(p, n, seed, eps):
    rng = np.random.default_rng(seed)
    b = rng.integers(0, p, size=n)
    assert row_character_damping(b, p, eps) == (1 - eps) ** int(np.count_nonzero(b))


@given(st.sampled_from([2, 3, 5]), st.integers(1, 5), st.integers(0, 9999))
@settings(max_examples=30, deadline=None)
def test_q_mixture_agrees_with_full_sweep(p, n, seed):
    b = np.random.default_rng(seed).integers(0, p, size=n)
    table = q_table_enumerated(b, p)
    for t in range(n + 1):
        assert q_of_t_mixture(b, p, t) == table[t] == q_of_t(b, p, t, "enumerate")


def test_subset_examples():
    assert subset_expectation(3, 2, (1, 2)) == (1, 1)
    assert subset_expectation(5, 2, (1, 1, 3)) == (Fraction(1, 2), Fraction(1, 2))
    assert subset_expectation(5, 2, (1, 3))[0] == 0
    assert subset_expectation(7, 3, (4,)) == (0, 0)


def test_subset_closed_form_domain():
    assert subset_expectation_closed(5, 2, (1, 1, 1, 2)) is None
    assert subset_expectation_closed(2, 1, (1, 1, 1)) == 0
    with pytest.raises(ValueError):
        subset_expectation(5, 2, (1, 1, 1, 2))


@given(st.sampled_from([3, 5, 7]), st.data())
@settings(max_examples=60, deadline=None)
def test_subset_closed_forms_match_enumeration(p, data):
    r = data.draw(st.integers(1, p - 1))
    y = data.draw(st.lists(st.integers(1, p - 1), min_size=1, max_size=3))
    closed, enumerated = subset_expectation(p, r, tuple(y))
    assert closed == enumerated


def test_density_matrix_route_matches_classical_mixing():
    rng = np.random.default_rng(7)
    for p, n in [(2, 3), (3, 2)]:
        st_ = random_state(p, n, rng)
        for eps in (0.1, 0.9):
            a = density_matrix_oracle(st_, NoiseModel(eps))
            assert np.max(np.abs(a - noisy_output_distribution(st_, NoiseModel(eps)))) < 1e-12


def test_small_suite_passes_every_identity():
    results = lemma_suite(primes=(2, 3), max_t=3, max_n=4)
    assert [r.name for r in results] == list(LEMMA_NAMES)
    assert all(r.passed and r.cases > 0 for r in results)


def test_suite_catches_wrong_damping_formula():
    results = lemma_suite(primes=(2, 3), max_t=2, max_n=3, damping=lambda eps, L: (1 - eps) ** (L + 1))
    by_name = {r.name: r for r in results}
    assert not by_name["row-character-damping"].passed
    assert by_name["row-character-damping"].first_failure
    assert by_name["inner-product-zero-probability"].passed
