"""Pareto dominance, sub-optimality gaps and complexity terms on known means.

All arms are 0-indexed. Objectives are maximised: arm ``i`` is dominated by
arm ``j`` when ``mu_j >= mu_i`` componentwise with at least one strict
coordinate.
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import DegenerateInstanceError


def as_means(theta) -> np.ndarray:
    """Validate and return a ``(K, D)`` float64 mean matrix."""
    arr = np.asarray(theta, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise ValueError(f"mean matrix must be 2-D, got shape {arr.shape}")
    if arr.shape[0] < 2:
        raise ValueError(f"need at least 2 arms, got {arr.shape[0]}")
    if arr.shape[1] < 1:
        raise ValueError("need at least 1 objective")
    if not np.all(np.isfinite(arr)):
        raise ValueError("mean matrix contains non-finite entries")
    return arr


def _check_pair(theta, i, j):
    K = theta.shape[0]
    for a in (i, j):
        if not 0 <= a < K:
            raise ValueError(f"arm index {a} out of range [0, {K})")
    if i == j:
        raise ValueError("margins are only defined for distinct arms")


def big_m(theta, i: int, j: int) -> float:
    """M(i, j) = max_d (mu_i^d - mu_j^d): uniform shift of j needed to dominate i."""
    theta = as_means(theta)
    _check_pair(theta, i, j)
    return float(np.max(theta[i] - theta[j]))


def little_m(theta, i: int, j: int) -> float:
    """m(i, j) = min_d (mu_j^d - mu_i^d), computed as ``-big_m(i, j)``."""
    return -big_m(theta, i, j)


def margin_matrix(theta) -> np.ndarray:
    """All pairwise ``M(i, j)`` as a ``(K, K)`` array; the diagonal is 0."""
    theta = np.asarray(theta, dtype=np.float64)
    return np.max(theta[:, None, :] - theta[None, :, :], axis=2)


def dominance_matrix(theta) -> np.ndarray:
    """Boolean ``(K, K)`` array, ``out[i, j]`` true iff arm i is dominated by arm j."""
    theta = np.asarray(theta, dtype=np.float64)
    a = theta[:, None, :]
    b = theta[None, :, :]
    return np.all(a <= b, axis=2) & np.any(a < b, axis=2)


def pareto_mask(theta) -> np.ndarray:
    """Boolean mask of arms dominated by no other arm."""
    return ~dominance_matrix(theta).any(axis=1)


def pareto_set(theta) -> frozenset:
    """Indices of the Pareto optimal arms.

    Duplicated rows are tolerated: two identical undominated arms are both
    optimal.
    """
    theta = as_means(theta)
    return frozenset(int(i) for i in np.flatnonzero(pareto_mask(theta)))


def gap_suboptimal(theta, i: int) -> float:
    """Gap of a sub-optimal arm: largest ``m(i, j)`` over optimal arms ``j``."""
    theta = as_means(theta)
    opt = pareto_set(theta)
    if i in opt:
        raise ValueError(f"arm {i} is Pareto optimal")
    return max(little_m(theta, i, j) for j in opt)


def gap_optimal_parts(theta, i: int) -> tuple[float, float]:
    """The ``(delta_plus, delta_minus)`` pair whose minimum is an optimal arm's gap.

    Empty minima are ``+inf``.
    """
    theta = as_means(theta)
    opt = pareto_set(theta)
    if i not in opt:
        raise ValueError(f"arm {i} is not Pareto optimal")
    plus = min(
        (min(big_m(theta, i, j), big_m(theta, j, i)) for j in opt if j != i),
        default=np.inf,
    )
    minus = min(
        (max(big_m(theta, j, i), 0.0) + gap_suboptimal(theta, j)
         for j in range(theta.shape[0]) if j not in opt),
        default=np.inf,
    )
    return float(plus), float(minus)


def gap_optimal(theta, i: int) -> float:
    """Gap of an optimal arm: ``min(delta_plus, delta_minus)``."""
    return min(gap_optimal_parts(theta, i))


def unified_gaps(theta) -> np.ndarray:
    """Gaps of all arms from the margin matrix alone, without computing the Pareto set.

    ``Delta*_i = max_{j != i} m(i, j)`` is returned when positive; otherwise
    ``min_{j != i} [M(i, j) ^ (M(j, i)^+ + (Delta*_j)^+)]``.
    """
    M = margin_matrix(theta)
    K = M.shape[0]
    off = ~np.eye(K, dtype=bool)
    masked = np.where(off, M, np.inf)
    dstar = -masked.min(axis=1)
    partner = np.maximum(M.T, 0.0) + np.maximum(dstar, 0.0)[None, :]
    inner = np.where(off, np.minimum(M, partner), np.inf)
    small = inner.min(axis=1)
    return np.where(dstar > 0, dstar, small)


def gap_unified(theta, i: int) -> float:
    theta = as_means(theta)
    if not 0 <= i < theta.shape[0]:
        raise ValueError(f"arm index {i} out of range")
    return float(unified_gaps(theta)[i])


def gaps(theta) -> np.ndarray:
    """Per-arm gaps (vectorised, via :func:`unified_gaps`)."""
    return unified_gaps(as_means(theta))


def _h2(delta) -> float:
    inv = np.where(np.isinf(delta), 0.0, 1.0 / np.asarray(delta, dtype=np.float64) ** 2)
    ordered = np.sort(inv)[::-1]
    ranks = np.arange(1, len(ordered) + 1)
    return float(np.max(ranks * ordered))


@dataclass(frozen=True)
class GapProfile:
    pareto: frozenset
    delta: np.ndarray
    delta_star: np.ndarray
    h1: float
    h2: float

    @property
    def suboptimal(self) -> frozenset:
        return frozenset(range(len(self.delta))) - self.pareto


def complexity_profile(theta) -> GapProfile:
    """Gaps, the sum complexity ``H`` and the rank complexity ``H2``.

    Raises:
        DegenerateInstanceError: if some gap is not strictly positive, which
            happens with duplicated means.
    """
    theta = as_means(theta)
    delta = unified_gaps(theta)
    bad = np.flatnonzero(~(delta > 0))
    if bad.size:
        raise DegenerateInstanceError(
            f"arms {bad.tolist()} have zero gap (duplicated means?)"
        )
    M = margin_matrix(theta)
    off = ~np.eye(theta.shape[0], dtype=bool)
    dstar = -np.where(off, M, np.inf).min(axis=1)
    finite = np.isfinite(delta)
    h1 = float(np.sum(1.0 / delta[finite] ** 2))
    return GapProfile(
        pareto=pareto_set(theta),
        delta=delta,
        delta_star=dstar,
        h1=h1,
        h2=_h2(delta),
    )


@dataclass(frozen=True)
class RelaxedGapProfile:
    k: int
    omega_k: float
    delta_k: np.ndarray
    h2_k: float


def relaxed_profile(theta, k: int, profile: GapProfile | None = None) -> RelaxedGapProfile:
    """Gaps and ``H2`` for the "at most k optimal arms" relaxation.

    Optimal gaps are raised to the k-th largest optimal gap ``omega_k``
    (0 when fewer than k arms are optimal); sub-optimal gaps are unchanged.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if profile is None:
        profile = complexity_profile(theta)
    opt = np.array(sorted(profile.pareto), dtype=int)
    opt_gaps = np.sort(profile.delta[opt])[::-1]
    omega = float(opt_gaps[k - 1]) if len(opt_gaps) >= k else 0.0
    delta_k = profile.delta.copy()
    delta_k[opt] = np.maximum(delta_k[opt], omega)
    return RelaxedGapProfile(k=k, omega_k=omega, delta_k=delta_k, h2_k=_h2(delta_k))
