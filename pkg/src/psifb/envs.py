"""Bandit instances, Gaussian samplers, synthetic generators and instance files."""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np
from numba import njit

from .exceptions import InstanceFormatError
from .pareto import as_means, dominance_matrix, pareto_mask
from .rng import fill_normals, stream_keys

DEFAULT_SIGMA = 0.25


@dataclass(frozen=True, eq=False)
class BanditInstance:
    """Known means (``K x D``) and per-dimension noise scale of a Gaussian bandit."""

    means: np.ndarray
    sigma: np.ndarray
    name: str = field(default="instance")

    def __post_init__(self):
        means = as_means(self.means)
        sigma = np.broadcast_to(
            np.asarray(self.sigma, dtype=np.float64), (means.shape[1],)
        ).copy()
        if not np.all(np.isfinite(sigma)) or np.any(sigma < 0):
            raise ValueError("sigma must be finite and non-negative")
        means.setflags(write=False)
        sigma.setflags(write=False)
        object.__setattr__(self, "means", means)
        object.__setattr__(self, "sigma", sigma)

    @property
    def K(self) -> int:
        return self.means.shape[0]

    @property
    def D(self) -> int:
        return self.means.shape[1]

    def with_sigma(self, sigma) -> "BanditInstance":
        return BanditInstance(self.means, sigma, self.name)

    def sampler(self, seed: int = 0, stream: int = 0) -> "GaussianSampler":
        return GaussianSampler(self.means, self.sigma, seed=seed, stream=stream)


@njit(cache=True)
def _batch_means(means, sigma, keys, cursor, arms, n, out):
    D = means.shape[1]
    scale = 1.0 / np.sqrt(n)
    z = np.empty(D)
    for r in range(arms.shape[0]):
        a = arms[r]
        fill_normals(keys[a], cursor[a] * D, z)
        for d in range(D):
            out[r, d] = means[a, d] + sigma[d] * z[d] * scale
        cursor[a] += n


@njit(cache=True)
def _draws(means, sigma, key, start, n, arm, out):
    D = means.shape[1]
    z = np.empty(n * D)
    fill_normals(key, start * D, z)
    for s in range(n):
        for d in range(D):
            out[s, d] = means[arm, d] + sigma[d] * z[s * D + d]


class GaussianSampler:
    """Seeded Gaussian reward source with one counter-based stream per arm.

    The ``s``-th pull of arm ``a`` always sees the same noise for a given
    ``(seed, stream)``, regardless of the order in which arms are pulled.
    Each trial should own its sampler.

    Args:
        means: ``(K, D)`` mean matrix.
        sigma: scalar or length-``D`` noise scale; 0 gives exact means.
        seed: master seed.
        stream: trial index; distinct streams are independent.
    """

    def __init__(self, means, sigma, seed: int = 0, stream: int = 0):
        self.means = as_means(means)
        self.sigma = np.broadcast_to(
            np.asarray(sigma, dtype=np.float64), (self.means.shape[1],)
        ).copy()
        self.seed = int(seed)
        self.stream = int(stream)
        self.keys = stream_keys(self.seed, self.stream, self.K)
        self.cursor = np.zeros(self.K, dtype=np.int64)

    @property
    def K(self) -> int:
        return self.means.shape[0]

    @property
    def D(self) -> int:
        return self.means.shape[1]

    def sample(self, arm: int) -> np.ndarray:
        """One observation of ``arm``."""
        return self.draw(arm, 1)[0]

    def draw(self, arm: int, n: int) -> np.ndarray:
        """``n`` consecutive observations of ``arm`` as an ``(n, D)`` array."""
        if not 0 <= arm < self.K:
            raise ValueError(f"arm {arm} out of range")
        out = np.empty((n, self.D))
        _draws(self.means, self.sigma, self.keys[arm], self.cursor[arm], n, arm, out)
        self.cursor[arm] += n
        return out

    def draw_mean(self, arms, n: int) -> np.ndarray:
        """Average of ``n`` fresh observations for each arm in ``arms``.

        Gaussian averages are drawn exactly in distribution from a single
        normal, so this costs O(D) per arm whatever ``n`` is. With
        ``n == 1`` it returns the same value as :meth:`sample`.
        """
        arms = np.atleast_1d(np.asarray(arms, dtype=np.int64))
        if n < 1:
            raise ValueError("n must be >= 1")
        out = np.empty((arms.shape[0], self.D))
        _batch_means(self.means, self.sigma, self.keys, self.cursor, arms, n, out)
        return out


# --- synthetic instances -----------------------------------------------------------


def _exp1(rng):
    x = np.linspace(0.55, 0.95, 10)
    curve = np.column_stack([x**2, 1.0 / (4.0 * x**2)])
    block = []
    while len(block) < 50:
        p = rng.uniform(0.1, 0.8, size=2)
        if p[0] * p[1] > 0.2:
            continue
        # keep the |S*| = 10 structure: every extra arm sits under the curve arms
        if np.any(np.all(p <= curve, axis=1) & np.any(p < curve, axis=1)):
            block.append(p)
    return np.vstack([curve, np.array(block)])


def _exp2():
    rows = [(0.4, 0.75), (0.75, 0.4)]
    for i in range(1, 5):
        rows.append((0.45 + 0.2**i, 0.35 - 0.2**i))
        rows.append((0.10 + 0.2**i, 0.70 - 0.2**i))
    return np.array(rows)


def _exp3():
    b1 = np.linspace(np.pi / 12, np.pi / 2 - np.pi / 12, 20)
    b2 = np.linspace(np.pi / 2 + np.pi / 6, 2 * np.pi - np.pi / 6, 180)
    beta = np.concatenate([b1, b2])
    return np.column_stack([np.cos(beta), np.sin(beta)])


def _exp4(rng):
    low = rng.uniform(0.2, 0.45, size=(30, 10))
    high = rng.uniform(0.55, 0.75, size=(20, 10))
    return np.vstack([low, high])


def _exp5(rng):
    while True:
        theta = np.vstack([
            rng.uniform(0.2, 0.4, size=(10, 2)),
            rng.uniform(0.5, 0.7, size=(10, 2)),
        ])
        if pareto_mask(theta).sum() == 4:
            return theta


def _exp6():
    i = np.arange(1, 11)
    return np.column_stack([0.75 - 0.65**i, 0.25 + 0.65**i])


def _exp7():
    # spacing 0.05 is the value that makes all 22 gaps coincide (at 0.05);
    # rationals keep coincident coordinates bit-identical after rounding
    c = Fraction(1, 20)
    rows = []
    for i in range(1, 9):
        rows.append((Fraction(3, 10) + (i - 1) * c, Fraction(4, 5) - (i - 1) * c))
    for i in range(9, 16):
        rows.append((Fraction(1, 4) + (i - 9) * c, Fraction(7, 10) - (i - 9) * c))
    for i in range(16, 23):
        x, y = rows[i - 8]
        rows.append((x, y + Fraction(1, 20)))
    return np.array([[float(x), float(y)] for x, y in rows])


def _exp8():
    v = 0.75 - 0.25 ** np.arange(1, 6)
    return np.column_stack([v, v])


_GENERATORS = {
    1: ("exp1-convex", True),
    2: ("exp2-unique-dominator", False),
    3: ("exp3-circle", False),
    4: ("exp4-d10", True),
    5: ("exp5-clusters", True),
    6: ("exp6-all-optimal", False),
    7: ("exp7-equal-gaps", False),
    8: ("exp8-geometric", False),
}


def gen_experiment(exp_id: int, seed: int = 0, sigma=DEFAULT_SIGMA) -> BanditInstance:
    """Synthetic benchmark instance ``exp_id`` in 1..8.

    ``seed`` only matters for the randomly drawn instances (1, 4 and 5).
    """
    if exp_id not in _GENERATORS:
        raise ValueError(f"unknown experiment id {exp_id!r}; expected 1..8")
    name, random = _GENERATORS[exp_id]
    rng = np.random.default_rng([exp_id, int(seed)])
    builders = {1: lambda: _exp1(rng), 2: _exp2, 3: _exp3, 4: lambda: _exp4(rng),
                5: lambda: _exp5(rng), 6: _exp6, 7: _exp7, 8: _exp8}
    theta = builders[exp_id]()
    if random:
        name = f"{name}-seed{seed}"
    return BanditInstance(theta, sigma, name=name)


def unique_dominators(theta) -> dict:
    """Map each dominated arm to the sorted list of arms that dominate it."""
    dom = dominance_matrix(as_means(theta))
    return {int(i): np.flatnonzero(dom[i]).tolist() for i in np.flatnonzero(dom.any(axis=1))}


# --- instance files ----------------------------------------------------------------


def _parse_row(path, lineno, fields):
    try:
        return [float(f) for f in fields]
    except ValueError:
        raise InstanceFormatError(path, lineno, f"non-numeric field in {fields!r}") from None


def load_instance(path, header: bool = False, sigma=None) -> BanditInstance:
    """Read an instance CSV.

    Format: one arm per row with ``D`` comma-separated means. Blank lines and
    lines starting with ``#`` are ignored. A row whose first field is
    ``sigma`` gives the noise scale (one value, or ``D`` values). With
    ``header=True`` the first data line is ``K,D`` or ``K,D,sigma`` and is
    checked against the body.

    Args:
        path: file to read.
        header: whether a ``K,D[,sigma]`` header line is present.
        sigma: fallback noise scale when the file carries none
            (default 0.25).

    Raises:
        InstanceFormatError: malformed content, with the offending line number.
        ValueError: non-finite means or noise scales.
    """
    path = Path(path)
    rows, file_sigma, expect = [], None, None
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            fields = [f.strip() for f in line.split(",")]
            if header and expect is None:
                vals = _parse_row(path, lineno, fields)
                if len(vals) not in (2, 3) or vals[0] != int(vals[0]) or vals[1] != int(vals[1]):
                    raise InstanceFormatError(path, lineno, "header must be K,D[,sigma]")
                expect = (int(vals[0]), int(vals[1]))
                if len(vals) == 3:
                    file_sigma = vals[2]
                continue
            if fields[0].lower() == "sigma":
                file_sigma = _parse_row(path, lineno, fields[1:])
                if not file_sigma:
                    raise InstanceFormatError(path, lineno, "empty sigma row")
                continue
            vals = _parse_row(path, lineno, fields)
            if rows and len(vals) != len(rows[0]):
                raise InstanceFormatError(
                    path, lineno, f"expected {len(rows[0])} columns, got {len(vals)}"
                )
            rows.append(vals)
    if not rows:
        raise InstanceFormatError(path, 0, "no arms found")
    theta = np.array(rows)
    if expect is not None and expect != theta.shape:
        raise InstanceFormatError(path, 1, f"header says K,D = {expect}, body has {theta.shape}")
    if not np.all(np.isfinite(theta)):
        raise ValueError(f"{path}: non-finite mean entries")
    s = file_sigma if file_sigma is not None else (DEFAULT_SIGMA if sigma is None else sigma)
    s = np.asarray(s, dtype=np.float64).ravel()
    if s.size == 1:
        s = s[0]
    elif s.size != theta.shape[1]:
        raise InstanceFormatError(path, 0, f"sigma has {s.size} values for D = {theta.shape[1]}")
    if not np.all(np.isfinite(s)):
        raise ValueError(f"{path}: non-finite sigma")
    return BanditInstance(theta, s, name=path.stem)


def format_instance(instance: BanditInstance, header: bool = False) -> str:
    """Instance CSV text; floats are written with ``repr`` so reading back is lossless."""
    lines = [f"# {instance.name}"]
    if header:
        lines.append(f"{instance.K},{instance.D}")
    lines.extend(",".join(repr(float(v)) for v in row) for row in instance.means)
    lines.append("sigma," + ",".join(repr(float(v)) for v in instance.sigma))
    return "\n".join(lines) + "\n"


def save_instance(instance: BanditInstance, path, header: bool = False) -> None:
    """Write ``instance`` in the format read by :func:`load_instance`."""
    Path(path).write_text(format_instance(instance, header), encoding="utf-8")


def is_sigma_uniform(instance: BanditInstance) -> bool:
    return bool(np.all(instance.sigma == instance.sigma[0]))


def resolve_instance(source: str, seed: int = 0, sigma=None) -> BanditInstance:
    """Build an instance from ``exp:N`` or a CSV path."""
    if source.startswith("exp:"):
        try:
            exp_id = int(source.split(":", 1)[1])
        except ValueError:
            raise ValueError(f"bad instance spec {source!r}") from None
        inst = gen_experiment(exp_id, seed=seed)
        return inst if sigma is None else inst.with_sigma(sigma)
    inst = load_instance(source)
    return inst if sigma is None else inst.with_sigma(sigma)


def geometric_budgets(lo: int, hi: int, n: int = 8) -> list:
    """``n`` log-spaced integer budgets in ``[lo, hi]`` (deduplicated)."""
    if hi <= lo:
        return [int(lo)]
    vals = np.geomspace(lo, hi, n)
    return sorted({int(math.ceil(v)) for v in vals})
