"""
Gaps and complexities on small instances
=========================================

Walks through the quantities that drive every error bound in the package:
Pareto set, per-arm gaps, the complexities H and H2, and their k-relaxed
versions.
"""

import numpy as np

from psifb.envs import gen_experiment
from psifb.pareto import big_m, complexity_profile, little_m, relaxed_profile

# three arms in two objectives; arm 3 is dominated by arm 1 only
theta = np.array([[1.0, 0.2],
                  [0.2, 1.0],
                  [0.5, 0.1]])

# M(i, j) is how far i can beat j on its best coordinate,
# m(i, j) how far j beats i on every coordinate
print("M(1, 2) =", big_m(theta, 0, 1))
print("m(3, 1) =", little_m(theta, 2, 0))

prof = complexity_profile(theta)
print("Pareto set (0-based):", sorted(prof.pareto))
print("gaps:", prof.delta)
print("H  =", prof.h1)
print("H2 =", prof.h2)

# %%
# Relaxing to k = 1: only one optimal arm must be found, so the easiest one
# sets the bar and the complexity halves.
rel = relaxed_profile(theta, 1, prof)
print("omega_(1) =", rel.omega_k, " H2^(1) =", rel.h2_k)

# %%
# A harder instance: five arms on the diagonal at geometric distances from
# the single optimal arm. Gaps shrink by a factor 4 per arm, so H is
# dominated by the closest competitor.
exp8 = gen_experiment(8)
p8 = complexity_profile(exp8.means)
print(exp8.name, "means:\n", exp8.means)
print("gaps:", p8.delta)
print(f"H = {p8.h1:.1f}, H2 = {p8.h2:.1f}, H / H2 = {p8.h1 / p8.h2:.3f}")
