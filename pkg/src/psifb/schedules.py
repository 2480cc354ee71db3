"""Round schedules for elimination algorithms.

A schedule fixes the number of rounds ``R``, the number of active arms at the
start of each round ``lam = (lam_1, ..., lam_{R+1})`` and the number of fresh
samples per active arm in each round ``t = (t_1, ..., t_R)``. Constructors
use exact integer/rational arithmetic so floors and ceilings never drift.
"""

import operator
from dataclasses import dataclass, field
from fractions import Fraction

from .exceptions import InsufficientBudgetError


@dataclass(frozen=True)
class Schedule:
    lam: tuple
    t: tuple
    name: str = field(default="custom", compare=False)

    @property
    def rounds(self) -> int:
        return len(self.t)

    @property
    def cumulative(self) -> tuple:
        """``n_r``: total samples per surviving arm after each round."""
        out, n = [], 0
        for tr in self.t:
            n += tr
            out.append(n)
        return tuple(out)

    @property
    def total(self) -> int:
        """``sum_r lam_r * t_r``: samples consumed by a full run."""
        return sum(l * tr for l, tr in zip(self.lam, self.t))


@dataclass(frozen=True)
class ScheduleCheck:
    violations: tuple

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok


def validate_schedule(s: Schedule, K: int, T: int) -> ScheduleCheck:
    """Check the round/budget constraints of ``s`` for ``K`` arms and budget ``T``.

    Constraints: ``R >= 1``; ``len(lam) == R + 1``; ``lam_1 == K``;
    ``lam_{R+1}`` in {0, 1}; ``lam`` strictly decreasing; integer ``t_r >= 0``
    with ``t_1 >= 1`` (every arm is sampled before it is first scored);
    ``sum_r lam_r t_r <= T``.
    """
    v = []
    R = len(s.t)
    if R < 1:
        v.append("R >= 1 fails: schedule has no rounds")
    if len(s.lam) != R + 1:
        v.append(f"len(lam) = {len(s.lam)} but R + 1 = {R + 1}")
    if s.lam and s.lam[0] != K:
        v.append(f"lam_1 = {s.lam[0]} != K = {K}")
    if s.lam and s.lam[-1] not in (0, 1):
        v.append(f"lam_(R+1) = {s.lam[-1]} not in {{0, 1}}")
    for r in range(len(s.lam) - 1):
        if not s.lam[r] > s.lam[r + 1]:
            v.append(f"lam_r > lam_(r+1) fails at r={r + 1}")
    for r, tr in enumerate(s.t):
        if int(tr) != tr or tr < 0:
            v.append(f"t_{r + 1} = {tr} is not a non-negative integer")
    if s.t and s.t[0] < 1:
        v.append("t_1 >= 1 fails: arms would be scored without samples")
    if len(s.lam) == R + 1 and s.total > T:
        v.append(f"sum lam_r t_r = {s.total} exceeds T = {T}")
    return ScheduleCheck(tuple(v))


def _ceil(q: Fraction) -> int:
    return -((-q.numerator) // q.denominator)


def log_bar(K: int) -> Fraction:
    """``1/2 + sum_{i=2}^K 1/i``."""
    return Fraction(1, 2) + sum((Fraction(1, i) for i in range(2, K + 1)), Fraction(0))


def _ints(*vals):
    return tuple(operator.index(v) for v in vals)


def schedule_sr(K: int, T: int) -> Schedule:
    """Successive Rejects: one arm leaves per round, ``R = K - 1``."""
    K, T = _ints(K, T)
    if K < 2:
        raise ValueError("need K >= 2")
    if T < K:
        raise InsufficientBudgetError(f"T = {T} < K = {K}")
    lb = log_bar(K)
    n = [_ceil(Fraction(T - K) / (lb * (K + 1 - r))) for r in range(1, K)]
    if n[0] < 1:
        raise InsufficientBudgetError(f"T = {T} leaves no samples for the first round")
    t = tuple(b - a for a, b in zip([0] + n[:-1], n))
    lam = tuple(K + 1 - r for r in range(1, K + 1))
    return Schedule(lam=lam, t=t, name="sr")


def _ceil_log2(K: int) -> int:
    return (K - 1).bit_length()


def schedule_sh(K: int, T: int) -> Schedule:
    """Sequential Halving: half of the active arms leave per round."""
    K, T = _ints(K, T)
    if K < 2:
        raise ValueError("need K >= 2")
    if T < K:
        raise InsufficientBudgetError(f"T = {T} < K = {K}")
    R = _ceil_log2(K)
    lam = [K]
    for _ in range(R):
        lam.append(-(-lam[-1] // 2))
    t = tuple(T // (lam[r] * R) for r in range(R))
    if min(t) == 0:
        raise InsufficientBudgetError(f"T = {T} gives an empty round for K = {K}")
    return Schedule(lam=tuple(lam), t=t, name="sh")


def _floor_scaled_root(num: int, den: int, K: int, p: int, R: int) -> int:
    """``floor(num / den * K**(p / R))`` computed exactly."""
    # largest a with (a * den)**R <= num**R * K**p
    target = num**R * K**p
    lo, hi = 0, 1
    while (hi * den) ** R <= target:
        hi *= 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if (mid * den) ** R <= target:
            lo = mid
        else:
            hi = mid
    return lo


def schedule_gg(K: int, T: int, R: int) -> Schedule:
    """Geometric grid over ``R`` rounds.

    ``alpha_r = floor(T / R * K**(r/R) / K**(1 + 1/R))``, ``t_r = alpha_r -
    alpha_{r-1}`` and ``lam_r = floor(K / K**((r-1)/R))``.
    """
    K, T, R = _ints(K, T, R)
    if K < 2:
        raise ValueError("need K >= 2")
    if R < 1:
        raise ValueError("need R >= 1")
    if T < 2 * R * K:
        raise InsufficientBudgetError(f"geometric grid needs T >= 2RK = {2 * R * K}")
    # K**(r/R) / K**(1 + 1/R) = K**((r - 1)/R) / K
    alpha = [0] + [_floor_scaled_root(T, R * K, K, r - 1, R) for r in range(1, R + 1)]
    t = tuple(alpha[r] - alpha[r - 1] for r in range(1, R + 1))
    lam = tuple(_floor_scaled_root(1, 1, K, R - (r - 1), R) for r in range(1, R + 2))
    if any(not a > b for a, b in zip(lam, lam[1:])):
        raise ValueError(f"R = {R} is too large for K = {K}: arm counts {lam} do not decrease")
    s = Schedule(lam=lam, t=t, name=f"gg:{R}")
    if s.total > T:
        raise ValueError(f"geometric grid overspends: {s.total} > {T}")
    return s


def schedule_uniform(K: int, T: int) -> Schedule:
    """One round sampling every arm ``floor(T / K)`` times, then classifying all."""
    K, T = _ints(K, T)
    if K < 2:
        raise ValueError("need K >= 2")
    if T < K:
        raise InsufficientBudgetError(f"T = {T} < K = {K}")
    return Schedule(lam=(K, 0), t=(T // K,), name="uniform")
