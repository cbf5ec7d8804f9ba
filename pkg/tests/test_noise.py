import functools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dqilab.dqi_state import AmplitudeVector, build_dqi_state
from dqilab.fp_linalg import FpMatrix
from dqilab.instance import make_opi
from dqilab.noise import (
    NoiseModel,
    NotNormalizedError,
    expected_score_exact,
    noisy_output_distribution,
    noisy_sampler,
    sampled_score,
    tau_summary,
)
from dqilab.oracles import density_matrix_oracle
from dqilab.verify import distance_instances, random_coefficients, random_state


def _kron_kernel(p, n, eps):
    K = (1 - eps) * np.eye(p) + eps / p * np.ones((p, p))
    return functools.reduce(np.kron, [K] * n)


def test_noise_rate_is_validated():
    for bad in (-0.1, 1.5):
        with pytest.raises(ValueError):
            NoiseModel(bad)


def test_zero_noise_keeps_born_probabilities():
    st_ = random_state(3, 2, np.random.default_rng(0))
    assert np.allclose(noisy_output_distribution(st_, NoiseModel(0.0)), st_.probabilities(), atol=1e-15)


def test_full_noise_gives_uniform_output():
    st_ = random_state(5, 2, np.random.default_rng(1))
    assert np.allclose(noisy_output_distribution(st_, NoiseModel(1.0)), 1 / 25, atol=1e-15)


@given(st.integers(0, 10_000), st.floats(0, 1))
@settings(max_examples=40)
def test_axis_mixing_equals_tensor_power_kernel(seed, eps):
    rng = np.random.default_rng(seed)
    p, n = int(rng.choice([2, 3, 5])), int(rng.integers(1, 4))
    st_ = random_state(p, n, rng)
    q = noisy_output_distribution(st_, NoiseModel(eps))
    assert np.allclose(q, _kron_kernel(p, n, eps) @ st_.probabilities(), atol=1e-13)
    assert q.sum() == pytest.approx(1.0)
    assert np.all(q >= -1e-15)


@given(st.integers(0, 10_000), st.floats(0, 1))
@settings(max_examples=20)
def test_axis_order_is_irrelevant(seed, eps):
    rng = np.random.default_rng(seed)
    st_ = random_state(3, 3, rng)
    a = noisy_output_distribution(st_, NoiseModel(eps))
    b = noisy_output_distribution(st_, NoiseModel(eps), axis_order=[2, 0, 1])
    assert np.allclose(a, b, atol=1e-15)


@pytest.mark.parametrize("p,n", [(2, 1), (2, 2), (3, 1), (3, 2)])
def test_classical_mixing_matches_density_matrix_channel(p, n):
    rng = np.random.default_rng(p * 10 + n)
    for _ in range(5):
        st_ = random_state(p, n, rng)
        for eps in (0.0, 0.3, 1.0):
            diff = noisy_output_distribution(st_, NoiseModel(eps)) - density_matrix_oracle(st_, NoiseModel(eps))
            assert np.max(np.abs(diff)) <= 1e-12


def test_unnormalized_state_is_rejected():
    st_ = AmplitudeVector(np.array([1.0, 1.0]), 2, 1)
    with pytest.raises(NotNormalizedError):
        noisy_output_distribution(st_, NoiseModel(0.1))
    with pytest.raises(NotNormalizedError):
        noisy_sampler(st_, NoiseModel(0.1), seed=0, shots=3)


def test_tau_for_opi_is_power_of_survival():
    inst = make_opi(97, 4, seed=0)
    for eps in (0.0, 0.05, 0.5, 1.0):
        t = tau_summary(inst.B, NoiseModel(eps))
        assert abs(t.tau1 - (1 - eps) ** 4) <= 1e-15
        assert t.tau_inf == pytest.approx((1 - eps) ** 4)


def test_tau_mixed_degrees():
    B = FpMatrix([[1, 0, 0], [1, 1, 0], [1, 1, 1]], 2)
    t = tau_summary(B, NoiseModel(0.5))
    assert t.tau_rows.tolist() == [0.5, 0.25, 0.125]
    assert t.tau1 == pytest.approx(0.875 / 3)
    assert t.tau_inf == 0.5
    with pytest.raises(ValueError):
        tau_summary(B, NoiseModel(0.5), row_damping=[0.1, 0.2])


def test_expected_score_is_direct_weighted_sum():
    inst, l, _ = distance_instances(1, seed=5)[0]
    state = build_dqi_state(inst, random_coefficients(l, np.random.default_rng(2)))
    noise = NoiseModel(0.25)
    q = _kron_kernel(inst.p, inst.n, 0.25) @ state.probabilities()
    assert expected_score_exact(inst, state, noise) == pytest.approx(float(q @ inst.all_scores()), abs=1e-12)


def test_sampler_is_seeded_and_unbiased():
    inst, l, _ = distance_instances(1, seed=6)[0]
    state = build_dqi_state(inst, random_coefficients(l, np.random.default_rng(3)))
    noise = NoiseModel(0.2)
    a = noisy_sampler(state, noise, seed=42, shots=20_000)
    assert np.array_equal(a, noisy_sampler(state, noise, seed=42, shots=20_000))
    assert a.shape == (20_000, inst.n) and a.min() >= 0 and a.max() < inst.p
    mean, se = sampled_score(inst, a)
    assert abs(mean - expected_score_exact(inst, state, noise)) <= 4 * se
