"""Deterministic Monte Carlo evaluation over (algorithm x budget) grids.

Trial ``s`` of every cell uses noise stream ``s`` of the master seed, so all
algorithms in a grid see common random numbers and any cell can be re-run in
isolation. Per-trial outcomes are collected in trial order before they are
summed, which makes the output independent of the number of workers.
"""

import csv
import io
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields

import numpy as np

from .ape import ApeConfig, ape_fb_run, tune_a
from .ege import TrialRecord, ege_run, ege_sr_k_run, psi_k_loss
from .envs import BanditInstance, resolve_instance
from .exceptions import InsufficientBudgetError
from .hypervolume import default_reference, hv_fraction
from .pareto import as_means, complexity_profile, pareto_set
from .schedules import _ceil_log2, schedule_gg, schedule_sh, schedule_sr, schedule_uniform


# --- algorithms -------------------------------------------------------------------


@dataclass(frozen=True)
class AlgoSpec:
    """A parsed algorithm id such as ``ege-gg:3`` or ``ape-fb:c=0.1``."""

    name: str
    param: object = None
    text: str = ""

    def notes(self) -> str:
        if self.name == "ape-fb" and isinstance(self.param, tuple) and self.param[1] > 1:
            return "c > 1 lies outside the range covered by the error guarantee"
        return ""


def parse_algorithm(text: str) -> AlgoSpec:
    """Parse an algorithm id.

    Accepted ids: ``ege-sr``, ``ege-sh``, ``ege-gg:R``, ``uniform``,
    ``ege-sr-k:k``, ``ape-fb:<a>``, ``ape-fb:c=<c>`` (``c`` times the tuned
    value) and ``ape-fb-adapt``.
    """
    t = text.strip()
    name, _, arg = t.partition(":")
    try:
        if name in ("ege-sr", "ege-sh", "uniform", "ape-fb-adapt") and not arg:
            return AlgoSpec(name, None, t)
        if name == "ege-gg" and arg:
            R = int(arg)
            if R < 1:
                raise ValueError
            return AlgoSpec(name, R, t)
        if name == "ege-sr-k" and arg:
            k = int(arg)
            if k < 1:
                raise ValueError
            return AlgoSpec(name, k, t)
        if name == "ape-fb" and arg:
            if arg.startswith("c="):
                c = float(arg[2:])
                if not (c >= 0 and math.isfinite(c)):
                    raise ValueError
                return AlgoSpec(name, ("c", c), t)
            a = float(arg)
            if not (a >= 0 and math.isfinite(a)):
                raise ValueError
            return AlgoSpec(name, ("a", a), t)
    except ValueError:
        pass
    raise ValueError(f"unrecognised algorithm id {text!r}")


def build_schedule(algo: AlgoSpec, K: int, T: int):
    if algo.name == "ege-sr":
        return schedule_sr(K, T)
    if algo.name == "ege-sh":
        return schedule_sh(K, T)
    if algo.name == "ege-gg":
        return schedule_gg(K, T, algo.param)
    if algo.name == "uniform":
        return schedule_uniform(K, T)
    raise ValueError(f"{algo.text} is not a schedule-based algorithm")


def _ape_config(algo, T, K, h1):
    if algo.name == "ape-fb-adapt":
        return ApeConfig(adapt=True)
    kind, v = algo.param
    return ApeConfig(a=v if kind == "a" else v * tune_a(h1, T, K))


def _prepare(algo, instance, T, h1):
    """Everything a trial needs that does not depend on the noise stream."""
    K = instance.K
    if algo.name in ("ege-sr", "ege-sh", "ege-gg", "uniform"):
        return build_schedule(algo, K, T)
    if algo.name == "ege-sr-k":
        schedule_sr(K, T)
        return None
    if T < K:
        raise InsufficientBudgetError(f"T = {T} < K = {K}")
    if algo.name == "ape-fb" and algo.param[0] == "c" and h1 is None:
        raise ValueError("oracle tuning needs a non-degenerate instance")
    return _ape_config(algo, T, K, h1)


def run_trial(algo: AlgoSpec, instance: BanditInstance, T: int, seed: int, stream: int,
              prepared=None) -> TrialRecord:
    """One run of ``algo`` on noise stream ``stream``."""
    sampler = instance.sampler(seed, stream)
    if prepared is None:
        h1 = _safe_h1(instance.means)
        prepared = _prepare(algo, instance, T, h1)
    if algo.name in ("ege-sr", "ege-sh", "ege-gg", "uniform"):
        return ege_run(sampler, prepared, T)
    if algo.name == "ege-sr-k":
        return ege_sr_k_run(sampler, T, algo.param)
    return ape_fb_run(sampler, T, prepared)


def _safe_h1(theta):
    try:
        return complexity_profile(theta).h1
    except ValueError:
        return None


# --- judging ----------------------------------------------------------------------


@dataclass(frozen=True)
class TrialJudgement:
    loss: int
    tau: int
    samples: int
    hv_fraction: float = math.nan


def judge_trial(record: TrialRecord, theta, metric: str = "error", k: int | None = None,
                ref=None, hv: bool = False, pareto: frozenset | None = None) -> TrialJudgement:
    """Score one run against the true means.

    Args:
        record: the run's outcome.
        theta: true means.
        metric: ``"error"`` (loss 0 iff the recommendation is the Pareto set)
            or ``"psi-k"`` (see :func:`psifb.ege.psi_k_loss`).
        k: relaxation parameter, required for ``"psi-k"``.
        ref: hypervolume reference point.
        hv: also compute the hypervolume fraction.
        pareto: precomputed Pareto set of ``theta``.
    """
    theta = as_means(theta)
    if metric == "error":
        opt = pareto_set(theta) if pareto is None else pareto
        loss = int(record.recommended != opt)
    elif metric == "psi-k":
        if k is None:
            raise ValueError("psi-k metric needs k")
        loss = psi_k_loss(record.recommended, theta, k)
    else:
        raise ValueError(f"unknown metric {metric!r}")
    frac = hv_fraction(record.recommended, theta, ref) if hv else math.nan
    return TrialJudgement(loss, record.rounds_used, record.samples_used, frac)


# --- grid ---------------------------------------------------------------------------


@dataclass
class ExperimentSpec:
    """A grid of cells, one per (algorithm, budget) pair.

    Attributes:
        instance: ``exp:N``, a CSV path, or a :class:`BanditInstance`.
        algorithms: algorithm ids (see :func:`parse_algorithm`).
        budgets: budgets ``T``; ``None`` picks :func:`default_budgets`.
        trials: independent runs per cell.
        seed: master seed of the noise streams.
        metric: ``"error"`` or ``"psi-k"``.
        k: relaxation parameter for ``"psi-k"``; defaults to the ``k`` of an
            ``ege-sr-k:k`` algorithm.
        hv: also report the mean hypervolume fraction.
        hv_ref: hypervolume reference point (default: componentwise minimum
            of the means minus 1e-6).
        instance_seed: seed of the randomly drawn generated instances.
        sigma: noise scale overriding the instance's own.
    """

    instance: object
    algorithms: list
    budgets: list | None = None
    trials: int = 100
    seed: int = 0
    metric: str = "error"
    k: int | None = None
    hv: bool = False
    hv_ref: object = None
    instance_seed: int = 0
    sigma: object = None

    def resolve(self) -> BanditInstance:
        if isinstance(self.instance, BanditInstance):
            inst = self.instance
            return inst if self.sigma is None else inst.with_sigma(self.sigma)
        return resolve_instance(str(self.instance), seed=self.instance_seed, sigma=self.sigma)


@dataclass
class ResultRow:
    instance: str
    algorithm: str
    metric: str
    k: object
    T: int
    trials: int
    failures: object
    error_rate: float
    log10_error: float
    std_error: float
    mean_tau: float
    mean_samples: float
    mean_hv_fraction: float
    wall_time: object = None
    status: str = "ok"
    notes: str = ""


COLUMNS = tuple(f.name for f in fields(ResultRow))


def default_budgets(instance: BanditInstance, t_max: int | None = None, n: int = 8) -> list:
    """``n`` log-spaced budgets from ``K ceil(log2 K)`` up to ``t_max`` (default ``ceil(H)``)."""
    K = instance.K
    lo = K * max(1, _ceil_log2(K))
    if t_max is None:
        t_max = math.ceil(complexity_profile(instance.means).h1)
    if t_max <= lo:
        return [int(lo)]
    return sorted({int(math.ceil(v)) for v in np.geomspace(lo, t_max, n)})


def _chunk(args):
    algo, instance, T, seed, start, stop, prepared, metric, k, ref, hv, opt = args
    loss = np.empty(stop - start, dtype=np.int64)
    tau = np.empty(stop - start, dtype=np.int64)
    samples = np.empty(stop - start, dtype=np.int64)
    frac = np.empty(stop - start)
    for n, s in enumerate(range(start, stop)):
        rec = run_trial(algo, instance, T, seed, s, prepared)
        j = judge_trial(rec, instance.means, metric, k, ref, hv, opt)
        loss[n], tau[n], samples[n], frac[n] = j.loss, j.tau, j.samples, j.hv_fraction
    return loss, tau, samples, frac


def _log10_error(rate, trials):
    return math.log10(max(rate, 1.0 / (10 * trials)))


def run_cell(algo, instance, T, trials, seed=0, metric="error", k=None, ref=None, hv=False,
             pool=None, workers=1, timing=False) -> ResultRow:
    """Evaluate one (algorithm, budget) cell; failures are reported in the row."""
    if isinstance(algo, str):
        algo = parse_algorithm(algo)
    if metric == "psi-k" and k is None and algo.name == "ege-sr-k":
        k = algo.param
    name = instance.name
    base = dict(instance=name, algorithm=algo.text, metric=metric,
                k=k if metric == "psi-k" else None, T=int(T), trials=int(trials))
    t0 = time.perf_counter()
    try:
        prepared = _prepare(algo, instance, int(T), _safe_h1(instance.means))
        if hv and ref is None:
            ref = default_reference(instance.means)
        opt = pareto_set(instance.means)
        bounds = np.linspace(0, trials, max(1, min(workers, trials)) + 1).astype(int)
        jobs = [(algo, instance, int(T), seed, int(a), int(b), prepared, metric, k, ref, hv, opt)
                for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
        parts = list(pool.map(_chunk, jobs)) if pool is not None else [_chunk(j) for j in jobs]
    except Exception as exc:  # noqa: BLE001 - a failing cell must not stop the grid
        nan = math.nan
        return ResultRow(**base, failures=None, error_rate=nan, log10_error=nan, std_error=nan,
                         mean_tau=nan, mean_samples=nan, mean_hv_fraction=nan,
                         status=f"error: {type(exc).__name__}: {exc}", notes=algo.notes())
    loss, tau, samples, frac = (np.concatenate(p) for p in zip(*parts))
    failures = int(loss.sum())
    rate = failures / trials
    return ResultRow(
        **base,
        failures=failures,
        error_rate=rate,
        log10_error=_log10_error(rate, trials),
        std_error=math.sqrt(rate * (1.0 - rate) / trials),
        mean_tau=float(tau.sum()) / trials,
        mean_samples=float(samples.sum()) / trials,
        mean_hv_fraction=float(frac.sum()) / trials if hv else math.nan,
        wall_time=time.perf_counter() - t0 if timing else None,
        notes=algo.notes(),
    )


def run_grid(spec: ExperimentSpec, workers: int = 1, timing: bool = False) -> list:
    """Evaluate every (algorithm, budget) cell of ``spec``.

    Args:
        spec: the grid.
        workers: processes to spread trials over; results do not depend on it.
        timing: fill the ``wall_time`` column (which makes output non-reproducible).

    Returns:
        One :class:`ResultRow` per cell, algorithms outermost.
    """
    if spec.trials < 1:
        raise ValueError("trials must be >= 1")
    if spec.metric not in ("error", "psi-k"):
        raise ValueError(f"metric must be 'error' or 'psi-k', got {spec.metric!r}")
    algos = [parse_algorithm(a) if isinstance(a, str) else a for a in spec.algorithms]
    if not algos:
        raise ValueError("no algorithms given")
    if spec.metric == "psi-k" and spec.k is None and not any(a.name == "ege-sr-k" for a in algos):
        raise ValueError("psi-k metric needs k")
    instance = spec.resolve()
    budgets = default_budgets(instance) if spec.budgets is None else [int(T) for T in spec.budgets]
    for T in budgets:
        if T < instance.K:
            raise ValueError(f"budget {T} is below K = {instance.K}")
    ref = None if spec.hv_ref is None else np.asarray(spec.hv_ref, dtype=np.float64)
    pool = ProcessPoolExecutor(workers) if workers > 1 else None
    try:
        return [
            run_cell(a, instance, T, spec.trials, spec.seed, spec.metric, spec.k, ref,
                     spec.hv, pool, workers, timing)
            for a in algos for T in budgets
        ]
    finally:
        if pool is not None:
            pool.shutdown()


# --- output ---------------------------------------------------------------------------


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in rows:
        w.writerow([_fmt(getattr(r, c)) for c in COLUMNS])
    return buf.getvalue()


def emit_csv(rows, path) -> None:
    """Write rows as CSV (fixed column order, floats at 17 significant digits).

    ``path`` may be a filesystem path or an open text stream.

    Raises:
        OSError: the file cannot be written; the message names the path.
    """
    text = rows_to_csv(rows)
    if hasattr(path, "write"):
        path.write(text)
        return
    try:
        with open(os.fspath(path), "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write results to {path}: {exc.strerror or exc}") from exc


_INT_COLS = {"T", "trials", "failures", "k"}
_FLOAT_COLS = {"error_rate", "log10_error", "std_error", "mean_tau", "mean_samples",
               "mean_hv_fraction", "wall_time"}


def read_csv(path) -> list:
    """Parse a file written by :func:`emit_csv` back into rows."""
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != COLUMNS:
            raise ValueError(f"{path}: unexpected columns {reader.fieldnames}")
        out = []
        for rec in reader:
            vals = {}
            for c in COLUMNS:
                s = rec[c]
                if c in _INT_COLS:
                    vals[c] = int(s) if s else None
                elif c in _FLOAT_COLS:
                    vals[c] = float(s) if s else None
                else:
                    vals[c] = s
            out.append(ResultRow(**vals))
        return out
