"""
Noise-weighted sparsity of polynomial-intersection instances
============================================================

Every row of the Vandermonde matrix over F_97 is dense, so each constraint
survives local depolarizing noise with probability (1 - eps)^n.  The excess
over random guessing shrinks by that factor; this script tabulates it.
"""

import numpy as np

from dqilab import NoiseModel, make_opi, tau_summary
from dqilab.predictor import build_A, d_parameter, max_eigenvalue

p = 97
grid = np.arange(0, 0.5, 0.05)

print("eps   " + "".join(f"n={n:<9d}" for n in (2, 5, 10, 20)))
for eps in grid:
    row = [tau_summary(make_opi(p, n).B, NoiseModel(float(eps))).tau1 for n in (2, 5, 10, 20)]
    print(f"{eps:4.2f}  " + "".join(f"{v:<11.4g}" for v in row))

# %%
# The best noiseless excess per constraint at degree l = m/4, scaled by tau1.
inst = make_opi(p, 10)
r = inst.r
lam = max_eigenvalue(build_A(inst.m, inst.m // 4, d_parameter(p, r)))
excess = np.sqrt(r * (p - r)) / p * lam / inst.m
print(f"\nOPI p={p} n=10, r={r}: random guessing {r / p:.4f}, noiseless excess {excess:.4f} per constraint")
for eps in (0.0, 0.01, 0.05, 0.1):
    tau1 = tau_summary(inst.B, NoiseModel(eps)).tau1
    print(f"  eps={eps:<5} satisfied fraction {r / p + tau1 * excess:.4f}")
