"""
Error probability against budget
=================================

Runs the Monte Carlo harness on the geometric five-arm instance and prints
the error rate of each algorithm on a log-spaced budget grid. Every
algorithm sees the same noise streams, so the differences are paired.
"""

import math
import sys

from psifb.envs import gen_experiment
from psifb.harness import ExperimentSpec, emit_csv, run_grid
from psifb.pareto import complexity_profile

TRIALS = 500

inst = gen_experiment(8)
H = complexity_profile(inst.means).h1
budgets = sorted({math.ceil(H * f) for f in (0.1, 0.25, 0.5, 1.0)})

spec = ExperimentSpec(inst, ["ege-sr", "ege-sh", "uniform", "ape-fb:c=1"],
                      budgets=budgets, trials=TRIALS, seed=0)
rows = run_grid(spec)

print(f"{inst.name}: H = {H:.0f}, {TRIALS} trials per cell\n")
print(f"{'algorithm':<12}" + "".join(f"{'T=' + str(T):>12}" for T in budgets))
for name in spec.algorithms:
    rates = [r.error_rate for r in rows if r.algorithm == name]
    print(f"{name:<12}" + "".join(f"{e:>12.4f}" for e in rates))

# %%
# The same rows as CSV, ready for any plotting tool.
print()
emit_csv(rows, sys.stdout)
