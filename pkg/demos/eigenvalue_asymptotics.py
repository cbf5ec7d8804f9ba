"""
Large-m behaviour of the tridiagonal eigenvalue
===============================================

With l = mu m the top eigenvalue of A(m, l, d) grows linearly in m.  The
table shows how quickly lambda_max / m approaches mu d + 2 sqrt(mu (1 - mu)).
Convergence is slow for small mu: the gap falls by roughly 0.64 per doubling.
"""

import math

from dqilab.predictor import asymptotic_lambda, asymptotic_optimal_score, build_A, d_parameter, max_eigenvalue

sizes = (200, 500, 1000, 2000, 4000)
print("mu    d   limit    " + "".join(f"m={m:<8d}" for m in sizes))
for mu in (0.1, 0.25, 0.5):
    for d in (0.0, 1.0):
        lim = asymptotic_lambda(mu, d)
        gaps = [abs(max_eigenvalue(build_A(m, math.floor(mu * m), d)) / m - lim) / lim for m in sizes]
        print(f"{mu:<5} {d:<3} {lim:.4f}   " + "".join(f"{g:<10.3%}" for g in gaps))

# %%
# Optimal satisfied fraction as m grows, for p = 5, r = 2 and no noise.
p, r = 5, 2
print(f"\np={p} r={r}: limit of <s>/m by mu")
for mu in (0.1, 0.2, 0.3, 0.4, 0.5):
    m = 2000
    finite = r / p + math.sqrt(r * (p - r)) / p * max_eigenvalue(build_A(m, int(mu * m), d_parameter(p, r))) / m
    print(f"  mu={mu}: m=2000 gives {finite:.4f}, limit {asymptotic_optimal_score(mu, r / p, 1.0):.4f}")
