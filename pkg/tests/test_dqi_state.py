import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dqilab.dqi_state import (
    AmplitudeVector,
    DqiCoefficients,
    build_dqi_state,
    build_g_table,
    elementary_symmetric_values,
    fourier_state,
    gram_matrix,
    read_state,
    symmetric_poly_values,
    syndrome_side_state,
    write_state,
)
from dqilab.fp_linalg import FpMatrix, all_assignments, check_distance_condition
from dqilab.instance import MaxLinSatInstance, make_random_instance
from dqilab.verify import distance_instances, random_coefficients


def test_g_table_binary_values():
    inst = MaxLinSatInstance(FpMatrix([[1], [1]], 2), ((0,), (1,)))
    gt = build_g_table(inst)
    assert np.allclose(gt.g, [[1 / math.sqrt(2), -1 / math.sqrt(2)], [-1 / math.sqrt(2), 1 / math.sqrt(2)]], atol=1e-15)
    assert np.allclose(np.abs(gt.g_tilde[:, 1]), 1.0)


def test_g_table_ternary_values():
    inst = MaxLinSatInstance(FpMatrix([[1], [1]], 3), ((0,), (2,)))
    gt = build_g_table(inst)
    assert gt.g[0] == pytest.approx([math.sqrt(2 / 3), -math.sqrt(1 / 6), -math.sqrt(1 / 6)], abs=1e-15)
    assert gt.g[1] == pytest.approx([-math.sqrt(1 / 6), -math.sqrt(1 / 6), math.sqrt(2 / 3)], abs=1e-15)


@given(st.sampled_from([2, 3, 5, 7]), st.integers(0, 999))
@settings(max_examples=30)
def test_g_rows_are_centered_and_normalized(p, seed):
    r = 1 + seed % (p - 1)
    gt = build_g_table(make_random_instance(p, 3, 1, r, seed))
    assert np.allclose(gt.g.sum(axis=1), 0, atol=1e-12)
    assert np.allclose((gt.g**2).sum(axis=1), 1, atol=1e-12)
    assert np.allclose(gt.g_tilde[:, 0], 0)
    assert np.allclose((np.abs(gt.g_tilde) ** 2).sum(axis=1), 1, atol=1e-12)


def test_ordered_tuple_sum_three_values():
    a, b, c = 0.3, -1.1, 2.0
    e = elementary_symmetric_values(np.array([[a, b, c]]), 3)
    assert e[:, 0] == pytest.approx([1, a + b + c, a * b + a * c + b * c, a * b * c])


def test_symmetric_poly_is_factorial_times_elementary():
    inst = make_random_instance(3, 3, 2, 1, seed=5)
    gt = build_g_table(inst)
    P = symmetric_poly_values(inst, gt, 2)
    X = all_assignments(3, 2)
    for j, x in enumerate(X):
        v = [gt.g[i, int(inst.B.data[i] @ x % 3)] for i in range(3)]
        ordered = sum(v[i] * v[k] for i in range(3) for k in range(3) if i != k)
        assert P[2, j] == pytest.approx(ordered)
        assert ordered == pytest.approx(2 * (v[0] * v[1] + v[0] * v[2] + v[1] * v[2]))


def _naive_state(inst, w):
    """Direct sum over constraint subsets, normalized afterwards."""
    gt = build_g_table(inst)
    p, m, n = inst.p, inst.m, inst.n
    X = all_assignments(p, n)
    amps = np.zeros(len(X), dtype=complex)
    for j, x in enumerate(X):
        vals = [gt.g[i, int(inst.B.data[i] @ x % p)] for i in range(m)]
        for k, wk in enumerate(w):
            e = sum(math.prod(vals[i] for i in S) for S in itertools.combinations(range(m), k))
            amps[j] += wk * e / math.sqrt(p ** (n - k) * math.comb(m, k))
    return amps


@pytest.mark.parametrize("index", range(5))
def test_state_matches_direct_subset_sum(index):
    inst, l, _ = distance_instances(5, seed=3)[index]
    coeffs = random_coefficients(l, np.random.default_rng(index))
    state = build_dqi_state(inst, coeffs)
    assert np.allclose(state.amplitudes, _naive_state(inst, coeffs.w), atol=1e-13)
    assert state.norm_sq == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("index", range(8))
def test_state_is_inverse_transform_of_syndrome_side(index):
    inst, l, _ = distance_instances(8, seed=11)[index]
    coeffs = random_coefficients(l, np.random.default_rng(index))
    direct = build_dqi_state(inst, coeffs)
    via = fourier_state(syndrome_side_state(inst, coeffs), inverse=True)
    assert np.max(np.abs(direct.amplitudes - via.amplitudes)) < 1e-12


def test_gram_is_identity_under_distance_condition():
    for inst, l, _ in distance_instances(6, seed=2):
        assert np.allclose(gram_matrix(inst, l), np.eye(l + 1), atol=1e-12)


def test_gram_detects_colliding_syndromes():
    inst = MaxLinSatInstance(FpMatrix([[1, 0], [1, 0], [0, 1]], 2), ((0,), (1,), (0,)))
    assert not check_distance_condition(inst.B, 1).holds
    M = gram_matrix(inst, 1)
    assert not np.allclose(M, np.eye(2))
    coeffs = DqiCoefficients([0.6, 0.8])
    state = build_dqi_state(inst, coeffs)
    assert state.norm_sq == pytest.approx(float(np.real(coeffs.w.conj() @ M @ coeffs.w)), abs=1e-12)


@given(st.integers(0, 10_000))
@settings(max_examples=25)
def test_fourier_round_trip_is_unitary(seed):
    rng = np.random.default_rng(seed)
    p, n = int(rng.choice([2, 3, 5])), int(rng.integers(1, 4))
    a = rng.normal(size=p**n) + 1j * rng.normal(size=p**n)
    st_ = AmplitudeVector(a, p, n)
    ft = fourier_state(st_)
    assert ft.norm_sq == pytest.approx(st_.norm_sq)
    assert np.allclose(fourier_state(ft, inverse=True).amplitudes, a)


def test_coefficients_normalization():
    c = DqiCoefficients([3, 4])
    assert c.l == 1 and c.norm_sq == pytest.approx(25)
    assert not c.is_normalized and c.normalized().is_normalized
    with pytest.raises(ValueError):
        DqiCoefficients([])


def test_degree_above_m_is_rejected():
    inst = make_random_instance(2, 3, 2, 1, seed=0)
    with pytest.raises(ValueError):
        build_dqi_state(inst, DqiCoefficients(np.ones(5)))


def test_dense_budget_is_enforced():
    inst = make_random_instance(2, 12, 11, 1, seed=0)
    with pytest.raises(MemoryError):
        build_dqi_state(inst, DqiCoefficients([1.0]), max_dim=1024)


def test_state_file_round_trip(tmp_path):
    inst, l, _ = distance_instances(1, seed=4)[0]
    state = build_dqi_state(inst, random_coefficients(l, np.random.default_rng(0)))
    path = tmp_path / "s.bin"
    write_state(state, path)
    back = read_state(path)
    assert (back.p, back.n) == (state.p, state.n)
    assert np.array_equal(back.amplitudes, state.amplitudes)
    path.write_bytes(b"garbage!" + path.read_bytes()[8:])
    with pytest.raises(ValueError):
        read_state(path)
