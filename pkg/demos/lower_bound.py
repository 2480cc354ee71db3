"""
Where the exp(-2T / (sigma^2 H)) / 4 lower bound comes from
===========================================================

On a staircase instance every optimal arm alone dominates one sub-optimal
partner. Moving any single arm by twice its gap flips the Pareto set but
leaves every gap, and so H, unchanged. An algorithm that is accurate on one
instance must then be inaccurate on the other.
"""

import numpy as np

from psifb.lowerbound import (
    STAIRCASE,
    alternative_instance,
    class_b_check,
    lb_value,
    staircase_instance,
    verify_gap_preservation,
)
from psifb.pareto import pareto_set

rep = class_b_check(STAIRCASE)
print("staircase is a class member:", rep.member)
print("optimal arm -> partner:", rep.partners)

for i in range(len(STAIRCASE)):
    alt = alternative_instance(STAIRCASE, i, rep)
    g = verify_gap_preservation(STAIRCASE, i, rep)
    moved = np.argwhere(alt != STAIRCASE)[0]
    print(f"move arm {i} on axis {moved[1]}: Pareto set {sorted(pareto_set(STAIRCASE))}"
          f" -> {sorted(pareto_set(alt))}, H {g.h1:g} -> {g.h1_alt:g}")

# %%
# The resulting bound at a few budgets, unit noise.
for T in (0, 8, 16, 32):
    print(f"T = {T:>2}: error >= {lb_value(T, 16.0, 1.0):.5f}")

# %%
# Larger members with uneven gaps come from the same recipe.
big = staircase_instance([0.1, 0.3, 0.5])
print("\nthree-pair staircase member:", bool(class_b_check(big, "B'")))
