"""APE-FB: confidence-bonus sampling for a fixed budget, plus its adaptive variant.

After one pull per arm, each step forms the bonuses ``beta_i = 0.4 sqrt(a / n_i)``,
picks a candidate ``b`` and its closest competitor ``c``, and pulls whichever
of the two has fewer samples. The recommendation is the empirical Pareto set
of all arms once the budget is spent.

Two code paths share one decision rule: a compiled loop used for whole trials
and a plain Python loop over :class:`~psifb.ege.EmpiricalState`. Both read the
same noise stream and perform the same floating-point operations in the same
order, so their outputs are bit-identical.
"""

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .ege import EmpiricalState, TrialRecord, empirical_pareto_set
from .exceptions import InsufficientBudgetError, InvalidStateError
from .pareto import margin_matrix
from .rng import normal_pair, standard_normal_at

TUNE_CONST = 25.0 / 36.0
DEFAULT_FLOOR = 1e-3


def beta(a: float, n) -> np.ndarray:
    """Bonus ``(2/5) sqrt(a / n)``; vectorised over ``n``."""
    n = np.asarray(n)
    if a < 0:
        raise ValueError("a must be non-negative")
    if np.any(n < 1):
        raise InvalidStateError("bonus undefined for an arm with no pulls")
    return 0.4 * np.sqrt(a / n)


def tune_a(h1: float, T: int, K: int) -> float:
    """Largest exploration parameter covered by the error guarantee."""
    if T <= K:
        raise ValueError(f"need T > K, got T = {T}, K = {K}")
    if not h1 > 0:
        raise ValueError("h1 must be positive")
    return TUNE_CONST * (T - K) / h1


@dataclass(frozen=True)
class ApeConfig:
    """Run parameters.

    Attributes:
        a: exploration parameter; ignored when ``adapt`` is set.
        adapt: re-estimate the complexity from the current means every step.
        adapt_floor: gap floor used by the plug-in complexity.
    """

    a: float = 0.0
    adapt: bool = False
    adapt_floor: float = DEFAULT_FLOOR

    def __post_init__(self):
        if not self.a >= 0:
            raise ValueError("a must be >= 0")
        if not self.adapt_floor > 0:
            raise ValueError("adapt_floor must be > 0")


# --- compiled core ----------------------------------------------------------------


@njit(cache=True)
def _plugin_h(M, eps):
    K = M.shape[0]
    dstar = np.empty(K)
    for i in range(K):
        lo = np.inf
        for j in range(K):
            if j != i and M[i, j] < lo:
                lo = M[i, j]
        dstar[i] = -lo
    h = 0.0
    for i in range(K):
        g = dstar[i]
        if not g > 0:
            g = np.inf
            for j in range(K):
                if j == i:
                    continue
                v = max(M[j, i], 0.0) + max(dstar[j], 0.0)
                v = min(M[i, j], v)
                if v < g:
                    g = v
        g = max(g, eps)
        if g < np.inf:
            h += 1.0 / (g * g)
    return h


@njit(cache=True)
def _select(M, bonus, pulls):
    K = M.shape[0]
    n_opt = 0
    best_b = -1
    best_v = -np.inf
    for i in range(K):
        in_opt = True
        for j in range(K):
            if j != i and not (M[i, j] - bonus[i] - bonus[j] > 0):
                in_opt = False
                break
        if in_opt:
            n_opt += 1
            continue
        v = np.inf
        for j in range(K):
            if j != i:
                w = M[i, j] + bonus[i] + bonus[j]
                if w < v:
                    v = w
        if best_b < 0 or v > best_v:
            best_b = i
            best_v = v
    b = best_b
    if n_opt == K:
        best_v = np.inf
        for i in range(K):
            v = np.inf
            for j in range(K):
                if j != i:
                    w = M[i, j] - bonus[i] - bonus[j]
                    if w < v:
                        v = w
            if b < 0 or v < best_v:
                b = i
                best_v = v
    c = -1
    best_v = np.inf
    for j in range(K):
        if j != b:
            w = M[b, j] - bonus[j]
            if c < 0 or w < best_v:
                c = j
                best_v = w
    pull = c if pulls[c] < pulls[b] else b
    return b, c, pull


@njit(cache=True)
def _pull(means, sigma, keys, arm, pulls, mean, M):
    K, D = mean.shape
    q = pulls[arm] * D
    pulls[arm] += 1
    w = 1 / pulls[arm]
    d = 0
    while d < D:
        if (q + d) & 1 == 0 and d + 1 < D:
            z0, z1 = normal_pair(keys[arm], (q + d) >> 1)
            x = means[arm, d] + sigma[d] * z0
            mean[arm, d] += (x - mean[arm, d]) * w
            x = means[arm, d + 1] + sigma[d + 1] * z1
            mean[arm, d + 1] += (x - mean[arm, d + 1]) * w
            d += 2
        else:
            x = means[arm, d] + sigma[d] * standard_normal_at(keys[arm], q + d)
            mean[arm, d] += (x - mean[arm, d]) * w
            d += 1
    for j in range(K):
        if j == arm:
            continue
        hi = mean[arm, 0] - mean[j, 0]
        lo = mean[j, 0] - mean[arm, 0]
        for e in range(1, D):
            hi = max(hi, mean[arm, e] - mean[j, e])
            lo = max(lo, mean[j, e] - mean[arm, e])
        M[arm, j] = hi
        M[j, arm] = lo


@njit(cache=True)
def _ape_trial(means, sigma, keys, T, a, adapt, eps, pulls, mean, M):
    K = means.shape[0]
    for arm in range(K):
        _pull(means, sigma, keys, arm, pulls, mean, M)
    bonus = np.empty(K)
    for i in range(K):
        bonus[i] = 0.4 * np.sqrt(a / pulls[i])
    for _ in range(K, T):
        if adapt:
            at = (25.0 / 36.0) * (T - K) / _plugin_h(M, eps)
            for i in range(K):
                bonus[i] = 0.4 * np.sqrt(at / pulls[i])
        _, _, arm = _select(M, bonus, pulls)
        _pull(means, sigma, keys, arm, pulls, mean, M)
        if not adapt:
            # with a fixed a only the pulled arm's bonus moves
            bonus[arm] = 0.4 * np.sqrt(a / pulls[arm])


# --- python path ------------------------------------------------------------------


def adaptive_h(state: EmpiricalState, eps: float = DEFAULT_FLOOR) -> float:
    """Plug-in complexity ``sum_i max(gap_hat_i, eps)^-2`` over all arms."""
    return float(_plugin_h(margin_matrix(state.mean), float(eps)))


def _margins(state):
    M = margin_matrix(state.mean)
    np.fill_diagonal(M, 0.0)
    return M


def opt_set(state: EmpiricalState, bonuses) -> frozenset:
    """Arms whose margin over every other arm exceeds both bonuses."""
    M = _margins(state)
    b = np.asarray(bonuses, dtype=np.float64)
    K = state.K
    out = []
    for i in range(K):
        if all(M[i, j] - b[i] - b[j] > 0 for j in range(K) if j != i):
            out.append(i)
    return frozenset(out)


def select_bt_ct(state: EmpiricalState, bonuses) -> tuple:
    """The candidate ``b``, its competitor ``c`` and the arm to pull.

    Returns:
        ``(b, c, pull)``; ``pull`` is the less explored of the two (``b`` on ties).
    """
    if state.K < 2:
        raise ValueError("need K >= 2")
    if np.any(state.pulls < 1):
        raise InvalidStateError("every arm must be pulled once first")
    b, c, pull = _select(_margins(state), np.asarray(bonuses, dtype=np.float64), state.pulls)
    return int(b), int(c), int(pull)


def z_diagnostics(state: EmpiricalState, bonuses) -> tuple:
    """``(Z1, Z2)`` stopping-style statistics; empty minima are ``+inf``.

    ``Z1`` is the smallest bonus-corrected margin between two empirically
    optimal arms; ``Z2`` the smallest bonus-corrected domination margin of an
    empirically sub-optimal arm. Both positive means the empirical Pareto set
    is separated at the current confidence level. Neither drives sampling.
    """
    M = _margins(state)
    b = np.asarray(bonuses, dtype=np.float64)
    K = state.K
    s = sorted(empirical_pareto_set(state, range(K)))
    others = [i for i in range(K) if i not in s]
    z1 = min((M[i, j] - b[i] - b[j] for i in s for j in s if j != i), default=math.inf)
    z2 = min(
        (max(-M[i, j] - b[i] - b[j] for j in range(K) if j != i) for i in others),
        default=math.inf,
    )
    return float(z1), float(z2)


def _run_python(sampler, T, config, trace):
    K = sampler.K
    state = EmpiricalState(K, sampler.D)
    for arm in range(K):
        state.add_sample(arm, sampler.sample(arm))
    z_tau = None
    for t in range(K, T):
        a = config.a
        if config.adapt:
            a = TUNE_CONST * (T - K) / adaptive_h(state, config.adapt_floor)
        bonus = 0.4 * np.sqrt(a / state.pulls)
        if trace and z_tau is None:
            z1, z2 = z_diagnostics(state, bonus)
            if z1 > 0 and z2 > 0:
                z_tau = t
        _, _, arm = select_bt_ct(state, bonus)
        state.add_sample(arm, sampler.sample(arm))
    return state, z_tau


def _run_compiled(sampler, T, config):
    K, D = sampler.K, sampler.D
    if np.any(sampler.cursor != 0):
        raise InvalidStateError("compiled path needs a fresh sampler")
    pulls = np.zeros(K, dtype=np.int64)
    mean = np.zeros((K, D))
    M = np.zeros((K, K))
    _ape_trial(sampler.means, sampler.sigma, sampler.keys, int(T), float(config.a),
               bool(config.adapt), float(config.adapt_floor), pulls, mean, M)
    sampler.cursor[:] = pulls
    state = EmpiricalState(K, D)
    state.pulls[:] = pulls
    state.mean[:] = mean
    return state


def ape_fb_run(sampler, T: int, config: ApeConfig, engine: str = "auto",
               trace: bool = False) -> TrialRecord:
    """Run APE-FB for exactly ``T`` pulls.

    Args:
        sampler: a :class:`~psifb.envs.GaussianSampler` (compiled path) or any
            object with ``K``, ``D`` and ``sample(arm)`` (Python path).
        T: budget, at least ``K``.
        config: exploration parameter and adaptivity settings.
        engine: ``"compiled"``, ``"python"`` or ``"auto"``.
        trace: record in ``info["z_tau"]`` the first step at which both
            ``Z1`` and ``Z2`` are positive (Python path only).

    Returns:
        TrialRecord with ``info["pulls"]`` holding the final allocation.
    """
    K = sampler.K
    if T < K:
        raise InsufficientBudgetError(f"T = {T} < K = {K}")
    compiled_ok = hasattr(sampler, "keys") and hasattr(sampler, "cursor")
    if engine == "auto":
        engine = "compiled" if compiled_ok and not trace else "python"
    info = {"a": config.a, "adapt": config.adapt}
    if engine == "compiled":
        if not compiled_ok:
            raise ValueError("compiled engine needs a GaussianSampler")
        state = _run_compiled(sampler, T, config)
    elif engine == "python":
        state, z_tau = _run_python(sampler, T, config, trace)
        if trace:
            info["z_tau"] = z_tau
    else:
        raise ValueError(f"unknown engine {engine!r}")
    info["pulls"] = state.pulls.copy()
    rec = empirical_pareto_set(state, range(K))
    return TrialRecord(rec, 1, int(state.pulls.sum()), info=info)


def ape_fb_adapt_run(sampler, T: int, adapt_floor: float = DEFAULT_FLOOR,
                     engine: str = "auto") -> TrialRecord:
    """APE-FB with ``a_t = (25/36)(T - K) / H_hat_t`` re-estimated at every step."""
    return ape_fb_run(sampler, T, ApeConfig(adapt=True, adapt_floor=adapt_floor), engine)
