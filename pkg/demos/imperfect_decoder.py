"""
An imperfect syndrome decoder
=============================

A lookup-table decoder for a parity instance that cannot separate all
low-weight errors.  Failed errors drop out of the postselected state; the
averaged score still stays above a lower bound that degrades with the worst
failure fraction.
"""

import numpy as np

from dqilab import FpMatrix, MaxLinSatInstance, NoiseModel
from dqilab.decoder_lab import DecoderPolicy, build_D_correction, build_decoder, correction_bound, theorem3_experiment
from dqilab.predictor import principal_coefficients

# eight distinct nonzero rows of F_2^4: every weight-1 error has its own syndrome
rng = np.random.default_rng(3)
nonzero = [v for v in np.ndindex(2, 2, 2, 2) if any(v)]
rows = [nonzero[i] for i in rng.choice(len(nonzero), size=8, replace=False)]
inst = MaxLinSatInstance(FpMatrix(rows, 2), ((0,),) * 8)
coeffs = principal_coefficients(inst.m, 2, 0.0)
noise = NoiseModel(0.1)

print("inject   gamma_k              measured  bound (m+1)  bound (m+1)^2")
for frac in (0.0, 0.1, 0.25):
    policy = DecoderPolicy({1: frac, 2: frac} if frac else {}, seed=0)
    table, part = build_decoder(inst, 2, policy)
    res = theorem3_experiment(inst, coeffs, noise, table, part)
    gammas = " ".join(f"{g:.3f}" for g in part.gamma)
    print(f"{frac:<8} {gammas:<20} {res.measured_mean:.4f}    {res.bound_m1:9.4f}    {res.bound_m1sq:9.4f}")

# %%
# Weight-2 errors mostly collide on a 4-bit syndrome, so gamma_2 is large and
# the bound is vacuous.  At l = 1 the table starts out perfect and failures
# come only from injection.
coeffs1 = principal_coefficients(inst.m, 1, 0.0)
for frac in (0.0, 0.125, 0.25):
    table, part = build_decoder(inst, 1, DecoderPolicy({1: frac} if frac else {}, seed=0))
    res = theorem3_experiment(inst, coeffs1, noise, table, part)
    Dc = build_D_correction(inst, noise, part)
    dist, bound = correction_bound(inst, noise, part, Dc)
    print(f"l=1 gamma_max={part.gamma_max:.3f}: measured {res.measured_mean:.4f} >= {res.bound_m1:.4f}; "
          f"||D - (m/2) diag(gamma)|| = {dist:.4f} <= {bound:.4f}")
