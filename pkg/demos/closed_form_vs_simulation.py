"""
Closed form against the dense simulator
=======================================

For codes whose dual distance exceeds 2l + 1, the noisy expected score is an
explicit tridiagonal quadratic form.  Here we compare it with a brute-force
simulation of the DQI state followed by depolarizing noise.
"""

import numpy as np

from dqilab import NoiseModel, build_dqi_state, check_distance_condition, make_random_instance
from dqilab.noise import expected_score_exact, noisy_sampler, sampled_score
from dqilab.predictor import d_parameter, expected_score_theorem1, principal_coefficients

inst = None
for seed in range(200):
    cand = make_random_instance(3, 6, 4, 1, seed=seed)
    dc = check_distance_condition(cand.B, 1)
    if dc.holds:
        inst = cand
        break
print(f"p=3 m=6 n=4 instance (seed {seed}) satisfies the distance condition for l=1")

coeffs = principal_coefficients(inst.m, 1, d_parameter(inst.p, inst.r))
state = build_dqi_state(inst, coeffs)
print(f"state norm^2 = {state.norm_sq:.15f}")

print("\n eps   closed form        simulator          |diff|    sampled (1e5 shots)")
for eps in (0.0, 0.1, 0.3, 0.7, 1.0):
    noise = NoiseModel(eps)
    th = expected_score_theorem1(inst, coeffs, noise, dc)
    ex = expected_score_exact(inst, state, noise)
    mean, se = sampled_score(inst, noisy_sampler(state, noise, seed=1, shots=100_000))
    print(f" {eps:<4}  {th:.15f}  {ex:.15f}  {abs(th - ex):.1e}   {mean:.4f} +- {se:.4f}")

# %%
# Without the distance condition the closed form is not valid; the simulator
# still answers.
bad = make_random_instance(3, 6, 2, 1, seed=0)
print("\ndistance condition on a 6x2 matrix, l=1:", check_distance_condition(bad.B, 1).holds)
print("simulated score:", expected_score_exact(bad, build_dqi_state(bad, coeffs).normalized(), NoiseModel(0.1)))
