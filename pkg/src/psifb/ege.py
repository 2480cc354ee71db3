"""Empirical Gap Elimination and its k-relaxed early-stopping variant.

Each round every active arm receives ``t_r`` fresh samples, which are added to
its running mean (samples are never discarded). Arms with the largest
empirical gaps are then de-activated and classified on exit: accepted if they
are in the empirical Pareto set of the active arms, rejected otherwise.
"""

from dataclasses import dataclass, field

import numpy as np

from .exceptions import InvalidScheduleError, InvalidStateError
from .pareto import as_means, pareto_set
from .schedules import Schedule, schedule_sr, validate_schedule


class EmpiricalState:
    """Pull counts and running mean vectors for ``K`` arms.

    Means are updated incrementally, ``mean += (batch_mean - mean) * n / N``,
    so an arm fed exact means keeps exact means.
    """

    def __init__(self, K: int, D: int):
        self.pulls = np.zeros(K, dtype=np.int64)
        self.mean = np.zeros((K, D), dtype=np.float64)

    @classmethod
    def from_means(cls, means, pulls=1) -> "EmpiricalState":
        means = np.asarray(means, dtype=np.float64)
        if means.ndim == 1:
            means = means[:, None]
        st = cls(*means.shape)
        st.mean[:] = means
        st.pulls[:] = pulls
        return st

    @property
    def K(self) -> int:
        return self.mean.shape[0]

    @property
    def D(self) -> int:
        return self.mean.shape[1]

    def update(self, arms, batch_means, n: int) -> None:
        """Fold the averages of ``n`` new samples per arm into the state."""
        arms = np.asarray(arms, dtype=np.int64)
        total = self.pulls[arms] + n
        w = (n / total)[:, None]
        self.mean[arms] += (batch_means - self.mean[arms]) * w
        self.pulls[arms] = total

    def add_sample(self, arm: int, x) -> None:
        self.update([arm], np.asarray(x, dtype=np.float64)[None, :], 1)


def _active_means(state: EmpiricalState, active) -> tuple:
    idx = np.array(sorted(int(a) for a in active), dtype=np.int64)
    if idx.size and np.any(state.pulls[idx] < 1):
        raise InvalidStateError(
            f"arms {idx[state.pulls[idx] < 1].tolist()} are active but were never pulled"
        )
    return idx, state.mean[idx]


def _gap_core(mu):
    # returns (gaps, in_s) for the rows of mu, scored against each other only
    k = mu.shape[0]
    M = np.max(mu[:, None, :] - mu[None, :, :], axis=2)
    np.fill_diagonal(M, np.inf)
    dstar = -M.min(axis=1)
    in_s = dstar < 0
    partner = np.maximum(M.T, 0.0) + np.maximum(dstar, 0.0)[None, :]
    inner = np.minimum(M, partner)
    np.fill_diagonal(inner, np.inf)
    small = inner.min(axis=1) if k > 1 else np.full(k, np.inf)
    return np.where(in_s, small, dstar), in_s


def empirical_pareto_set(state: EmpiricalState, active) -> frozenset:
    """Active arms ``i`` with ``M_hat(i, j) > 0`` for every other active ``j``.

    Exact empirical ties exclude both tied arms.
    """
    idx, mu = _active_means(state, active)
    if idx.size == 1:
        return frozenset([int(idx[0])])
    _, in_s = _gap_core(mu)
    return frozenset(int(a) for a in idx[in_s])


def empirical_gaps(state: EmpiricalState, active) -> tuple:
    """Empirical gaps of the active arms.

    For arms outside the empirical Pareto set the gap is ``max_j m_hat(i, j)``.
    For arms inside it the gap is
    ``min_j [M_hat(i, j) ^ (M_hat(j, i)^+ + (Delta*_hat_j)^+)]``,
    with the competitor's ``Delta*_hat_j`` in the inner term.

    Returns:
        ``(gaps, s_r)``: a length-``K`` array holding NaN for inactive arms,
        and the empirical Pareto set as a frozenset.

    Raises:
        ValueError: fewer than two active arms.
        InvalidStateError: an active arm has no samples.
    """
    idx, mu = _active_means(state, active)
    if idx.size < 2:
        raise ValueError("empirical gaps need at least two active arms")
    g, in_s = _gap_core(mu)
    out = np.full(state.K, np.nan)
    out[idx] = g
    return out, frozenset(int(a) for a in idx[in_s])


def select_survivors(gaps, s_r, keep: int, active=None) -> tuple:
    """Keep the ``keep`` active arms with the smallest gaps.

    Ties are resolved in favour of arms in ``s_r``, then of lower indices.

    Returns:
        ``(survivors, removed)`` as sorted tuples.
    """
    gaps = np.asarray(gaps, dtype=np.float64)
    if active is None:
        active = np.flatnonzero(~np.isnan(gaps))
    order = sorted((int(a) for a in active), key=lambda a: (gaps[a], a not in s_r, a))
    if not 0 <= keep <= len(order):
        raise ValueError(f"cannot keep {keep} of {len(order)} arms")
    return tuple(sorted(order[:keep])), tuple(sorted(order[keep:]))


@dataclass
class TrialRecord:
    """Outcome of one run."""

    recommended: frozenset
    rounds_used: int
    samples_used: int
    accepted_trace: tuple = ()
    rejected_trace: tuple = ()
    info: dict = field(default_factory=dict)

    @property
    def accepted(self) -> frozenset:
        return frozenset(a for step in self.accepted_trace for a in step)

    @property
    def rejected(self) -> frozenset:
        return frozenset(a for step in self.rejected_trace for a in step)


def _check(schedule, K, T):
    report = validate_schedule(schedule, K, T)
    if not report.ok:
        raise InvalidScheduleError(report.violations)


def ege_run(sampler, schedule: Schedule, T: int | None = None) -> TrialRecord:
    """Run Empirical Gap Elimination with the given round schedule.

    Args:
        sampler: object with ``K``, ``D`` and ``draw_mean(arms, n)``.
        schedule: round structure, validated against ``T`` before sampling.
        T: nominal budget (defaults to the schedule's own total).

    Returns:
        The recommendation ``B ∪ A`` at the end of the last round.
    """
    K, D = sampler.K, sampler.D
    _check(schedule, K, schedule.total if T is None else T)
    state = EmpiricalState(K, D)
    active = list(range(K))
    acc, rej, used = [], [], 0
    for r, tr in enumerate(schedule.t):
        if tr > 0:
            state.update(active, sampler.draw_mean(active, tr), tr)
            used += len(active) * tr
        keep = schedule.lam[r + 1]
        if len(active) == 1:
            # a lone survivor has no competitor and is empirically optimal
            acc.append((active[0],))
            rej.append(())
            active = []
            continue
        g, s_r = empirical_gaps(state, active)
        survivors, removed = select_survivors(g, s_r, keep, active)
        acc.append(tuple(a for a in removed if a in s_r))
        rej.append(tuple(a for a in removed if a not in s_r))
        active = list(survivors)
    rec = frozenset(a for step in acc for a in step) | frozenset(active)
    return TrialRecord(rec, schedule.rounds, used, tuple(acc), tuple(rej))


def ege_sr_k_run(sampler, T: int, k: int) -> TrialRecord:
    """EGE with the Successive Rejects schedule that stops after ``k`` acceptances.

    Each round removes the arm with the largest empirical gap, preferring to
    remove arms outside the empirical Pareto set on ties, then lower indices.
    The run stops as soon as ``k`` arms have been accepted and returns them;
    otherwise it returns the accepted arms plus the last survivor.

    ``rounds_used`` is the stopping round and ``samples_used`` the samples
    drawn up to it.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    K, D = sampler.K, sampler.D
    schedule = schedule_sr(K, T)
    state = EmpiricalState(K, D)
    active = list(range(K))
    acc, rej, B, used = [], [], [], 0
    tau = schedule.rounds
    for r, tr in enumerate(schedule.t):
        if tr > 0:
            state.update(active, sampler.draw_mean(active, tr), tr)
            used += len(active) * tr
        g, s_r = empirical_gaps(state, active)
        out = min(active, key=lambda a: (-g[a], a in s_r, a))
        active.remove(out)
        if out in s_r:
            B.append(out)
            acc.append((out,))
            rej.append(())
            if len(B) == k:
                tau = r + 1
                break
        else:
            acc.append(())
            rej.append((out,))
    else:
        B.extend(active)
        return TrialRecord(frozenset(B), tau, used, tuple(acc), tuple(rej), {"stopped": False})
    return TrialRecord(frozenset(B), tau, used, tuple(acc), tuple(rej), {"stopped": True})


def psi_k_loss(recommended, theta, k: int) -> int:
    """1 on failure, 0 on success.

    A recommendation of exactly ``k`` arms succeeds when it contains only
    Pareto optimal arms; any other recommendation must equal the Pareto set.
    """
    rec = frozenset(int(a) for a in recommended)
    opt = pareto_set(as_means(theta))
    if len(rec) == k:
        return int(not rec <= opt)
    return int(rec != opt)


def successive_rejects_run(sampler, T: int) -> TrialRecord:
    """Classic single-objective Successive Rejects (best-arm identification).

    Drops the arm with the lowest empirical mean each round (lowest index on
    ties) and returns the last survivor. Requires ``D == 1``.
    """
    if sampler.D != 1:
        raise ValueError("successive rejects is defined for one objective")
    K = sampler.K
    schedule = schedule_sr(K, T)
    state = EmpiricalState(K, 1)
    active = list(range(K))
    used, rej = 0, []
    for tr in schedule.t:
        if tr > 0:
            state.update(active, sampler.draw_mean(active, tr), tr)
            used += len(active) * tr
        worst = min(active, key=lambda a: (state.mean[a, 0], a))
        active.remove(worst)
        rej.append((worst,))
    return TrialRecord(frozenset(active), schedule.rounds, used, (), tuple(rej))
