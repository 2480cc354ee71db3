"""Hard-instance machinery for the fixed-budget lower bound.

On instances of the structured class checked by :func:`class_b_check`, moving a
single arm by twice its gap along one axis flips the Pareto set while leaving
every gap unchanged. Any algorithm then errs on one of the two instances with
probability at least ``exp(-2T / (sigma^2 H)) / 4``.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .pareto import as_means, complexity_profile, dominance_matrix, margin_matrix, pareto_mask


@dataclass
class ClassBReport:
    """Outcome of a structural class check.

    Attributes:
        member: every condition holds.
        variant: ``"B"`` or ``"B'"``.
        witnesses: sub-optimal arm -> its dominator (``"B"``), or the arm
            reached by its shift (``"B'"``, where the dominator may not be unique).
        partners: optimal arm -> the sub-optimal arm it alone dominates.
        shift_dims: arm -> axis along which its alternative instance moves it.
        margin_checks: ``(i, j, M(i, j), bound)`` for every margin condition tested.
        violations: ``(condition, template, arms)`` per violated condition;
            ``template`` is a format string whose positional fields are arms.
    """

    member: bool
    variant: str
    witnesses: dict = field(default_factory=dict)
    partners: dict = field(default_factory=dict)
    shift_dims: dict = field(default_factory=dict)
    margin_checks: list = field(default_factory=list)
    violations: list = field(default_factory=list)

    def __bool__(self):
        return self.member

    def _fail(self, cond, template, *arms):
        self.violations.append((cond, template, arms))

    def describe(self, base: int = 0) -> list:
        """Violations as text, with arms numbered from ``base``."""
        out = []
        for cond, template, arms in self.violations:
            shown = [[a + base for a in x] if isinstance(x, list) else x + base for x in arms]
            out.append(f"({cond}) " + template.format(*shown))
        return out

    @property
    def failures(self) -> list:
        return self.describe(0)


def _strictly_beaten(x, others) -> bool:
    return bool(np.any(np.all(others > x, axis=1)))


def class_b_check(theta, variant: str = "B") -> ClassBReport:
    """Check membership in the lower-bound class (``"B"``) or its extension (``"B'"``).

    Class ``B``:
      (1) each sub-optimal arm is dominated by exactly one arm;
      (2) each optimal arm dominates exactly one arm;
      (3) ``M(i, j) >= 3 max(Delta_i, Delta_partner(j))`` for every sub-optimal
          ``i`` and optimal ``j`` that does not dominate ``i``.

    Class ``B'``:
      (1) each sub-optimal ``i`` has an axis ``d`` such that ``mu_i + Delta_i e_d``
          is not beaten in every coordinate by another arm;
      (2) each optimal ``i`` is the only maximal dominator of exactly one
          sub-optimal arm, and that arm is dominated by ``i`` alone;
      (3) ``M(i, j) >= 3 max(Delta_partner(i), Delta_partner(j))`` for optimal ``i != j``;
      (4) ``M(i, j) >= 3 max(Delta_i, Delta_j)`` whenever ``i`` is not dominated by ``j``.
    """
    if variant not in ("B", "B'"):
        raise ValueError(f"variant must be 'B' or \"B'\", got {variant!r}")
    theta = as_means(theta)
    K = theta.shape[0]
    prof = complexity_profile(theta)
    delta = prof.delta
    dom = dominance_matrix(theta)  # dom[i, j]: i dominated by j
    M = margin_matrix(theta)
    opt = pareto_mask(theta)
    subs = np.flatnonzero(~opt).tolist()
    opts = np.flatnonzero(opt).tolist()
    rep = ClassBReport(member=False, variant=variant)

    if variant == "B":
        for i in subs:
            doms = np.flatnonzero(dom[i]).tolist()
            if len(doms) != 1:
                rep._fail(1, "arm {} is dominated by {}, not by exactly one arm", i, doms)
                continue
            star = doms[0]
            rep.witnesses[i] = star
            rep.shift_dims[i] = int(np.argmin(theta[star] - theta[i]))
        for j in opts:
            under = np.flatnonzero(dom[:, j]).tolist()
            if len(under) != 1:
                rep._fail(2, "optimal arm {} dominates {}, not exactly one arm", j, under)
                continue
            rep.partners[j] = under[0]
        for i in subs:
            for j in opts:
                if dom[i, j] or j not in rep.partners:
                    continue
                bound = 3.0 * max(delta[i], delta[rep.partners[j]])
                rep.margin_checks.append((i, j, float(M[i, j]), float(bound)))
                if not M[i, j] >= bound:
                    rep._fail(3, f"M({{}},{{}}) = {M[i, j]:.6g} < {bound:.6g}", i, j)
    else:
        off = ~np.eye(K, dtype=bool)
        m = -M
        dstar = np.where(off, m, -np.inf).max(axis=1)
        omega_star = {i: [j for j in range(K) if j != i and m[i, j] == dstar[i]] for i in subs}
        for i in subs:
            others = np.delete(theta, i, axis=0)
            for d in range(theta.shape[1]):
                x = theta[i].copy()
                x[d] += delta[i]
                if not _strictly_beaten(x, others):
                    rep.shift_dims[i] = d
                    rep.witnesses[i] = omega_star[i][0] if omega_star[i] else None
                    break
            else:
                rep._fail(1, "no axis lifts arm {} onto the Pareto front", i)
        for j in opts:
            pi = [k for k in subs if omega_star[k] == [j]]
            ok = [k for k in pi if np.flatnonzero(dom[k]).tolist() == [j]]
            if len(pi) != 1 or len(ok) != 1:
                rep._fail(2, "optimal arm {}: arms {} it alone maximally dominates are not one arm dominated by it only", j, pi)
                continue
            rep.partners[j] = pi[0]
        for a in opts:
            for b in opts:
                if a == b or a not in rep.partners or b not in rep.partners:
                    continue
                bound = 3.0 * max(delta[rep.partners[a]], delta[rep.partners[b]])
                rep.margin_checks.append((a, b, float(M[a, b]), float(bound)))
                if not M[a, b] >= bound:
                    rep._fail(3, f"M({{}},{{}}) = {M[a, b]:.6g} < {bound:.6g}", a, b)
        for a in range(K):
            for b in range(K):
                if a == b or dom[a, b]:
                    continue
                bound = 3.0 * max(delta[a], delta[b])
                rep.margin_checks.append((a, b, float(M[a, b]), float(bound)))
                if not M[a, b] >= bound:
                    rep._fail(4, f"M({{}},{{}}) = {M[a, b]:.6g} < {bound:.6g}", a, b)

    for j, under in rep.partners.items():
        if under in rep.shift_dims:
            rep.shift_dims[j] = rep.shift_dims[under]
    rep.member = not rep.violations
    return rep


def alternative_instance(theta, i, report: ClassBReport | None = None) -> np.ndarray:
    """Means of the alternative instance obtained by moving arm ``i`` only.

    A sub-optimal arm moves up by ``2 Delta_i`` along its shift axis; an
    optimal arm moves down by ``2 Delta_i`` along the axis of the arm it alone
    dominates. ``i=None`` returns an unchanged copy.

    Raises:
        ValueError: ``i`` out of range, or the instance is not a class member.
    """
    theta = as_means(theta)
    if i is None:
        return theta.copy()
    if not 0 <= i < theta.shape[0]:
        raise ValueError(f"arm index {i} out of range")
    if report is None:
        report = class_b_check(theta)
    if not report.member:
        raise ValueError("instance is not a class member: " + "; ".join(report.failures))
    delta = complexity_profile(theta).delta
    out = theta.copy()
    d = report.shift_dims[i]
    sign = -1.0 if i in report.partners else 1.0
    out[i, d] += sign * 2.0 * delta[i]
    return out


@dataclass
class GapPreservation:
    """Gaps before and after moving one arm."""

    arm: object
    pareto_changed: bool
    max_rel_deviation: float
    h1: float
    h1_alt: float
    delta: np.ndarray
    delta_alt: np.ndarray

    def preserved(self, rtol: float = 1e-10) -> bool:
        return self.max_rel_deviation <= rtol


def verify_gap_preservation(theta, i, report: ClassBReport | None = None) -> GapPreservation:
    """Compare per-arm gaps and ``H`` of an instance and its alternative for arm ``i``."""
    theta = as_means(theta)
    if report is None and i is not None:
        report = class_b_check(theta)
    alt = alternative_instance(theta, i, report)
    p0, p1 = complexity_profile(theta), complexity_profile(alt)
    dev = np.abs(p1.delta - p0.delta) / np.abs(p0.delta)
    return GapPreservation(
        arm=i,
        pareto_changed=p0.pareto != p1.pareto,
        max_rel_deviation=float(dev.max()),
        h1=p0.h1,
        h1_alt=p1.h1,
        delta=p0.delta,
        delta_alt=p1.delta,
    )


def lb_value(T: float, h1: float, sigma: float) -> float:
    """``exp(-2T / (sigma^2 h1)) / 4``."""
    if T < 0:
        raise ValueError("T must be non-negative")
    if not (h1 > 0 and sigma > 0):
        raise ValueError("h1 and sigma must be positive")
    return 0.25 * math.exp(-2.0 * T / (sigma**2 * h1))


STAIRCASE = np.array([[-2.5, 3.0], [-3.0, 1.0], [2.0, -0.5], [1.5, -3.0]])


def staircase_instance(gaps, spacing: float = 8.0, depth: float = 2.5) -> np.ndarray:
    """A class member with one optimal/sub-optimal pair per entry of ``gaps``.

    Optimal arm ``k`` sits at ``(spacing * k, -spacing * k)``; its partner sits
    ``gaps[k]`` below it on the first axis and ``gaps[k] * (1 + depth)`` below
    on the second, so both arms of the pair have gap ``gaps[k]``. Rows are
    ordered optimal, partner, optimal, partner, ...
    """
    g = np.asarray(gaps, dtype=np.float64)
    if g.ndim != 1 or g.size < 1 or np.any(g <= 0):
        raise ValueError("gaps must be a non-empty vector of positive values")
    if g.size > 1 and spacing < 3.0 * (2.0 + depth) * g.max():
        raise ValueError("spacing too small for the margin condition")
    rows = []
    for k, gk in enumerate(g):
        top = np.array([spacing * k, -spacing * k])
        rows.append(top)
        rows.append(top - np.array([gk, gk * (1.0 + depth)]))
    return np.array(rows)
