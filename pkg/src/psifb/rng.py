"""Counter-based Gaussian noise.

Every draw is a pure function of ``(seed, stream, arm, index)``: a SplitMix64
finaliser hashes the counter into 64 random bits and a Box-Muller transform
turns pairs of them into normals. Nothing is carried between calls, so trials
can run in any order, on any worker, and still see the same numbers. The same
jitted functions are used by the Python samplers and by the compiled APE-FB
loop, which keeps the two paths bit-identical.
"""

import numpy as np
from numba import njit

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_ONE = np.uint64(1)
_TWO_PI = 2.0 * np.pi
_INV_2_53 = 1.0 / 9007199254740992.0

MASK64 = (1 << 64) - 1


@njit(cache=True)
def mix64(z):
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


@njit(cache=True)
def derive_key(parent, child):
    return mix64(parent ^ mix64(child + _GOLDEN))


@njit(cache=True)
def random_bits(key, index):
    return mix64(key + (index + _ONE) * _GOLDEN)


@njit(cache=True)
def standard_normal_at(key, q):
    """The q-th standard normal of the stream identified by ``key``."""
    p = np.uint64(q) >> _ONE
    x1 = random_bits(key, p << _ONE)
    x2 = random_bits(key, (p << _ONE) + _ONE)
    u1 = (np.float64(x1 >> np.uint64(11)) + 0.5) * _INV_2_53
    u2 = np.float64(x2 >> np.uint64(11)) * _INV_2_53
    r = np.sqrt(-2.0 * np.log(u1))
    if q & 1:
        return r * np.sin(_TWO_PI * u2)
    return r * np.cos(_TWO_PI * u2)


@njit(cache=True)
def normal_pair(key, p):
    """Normals ``2p`` and ``2p + 1`` of a stream, from one Box-Muller draw."""
    x1 = random_bits(key, np.uint64(p) << _ONE)
    x2 = random_bits(key, (np.uint64(p) << _ONE) + _ONE)
    u1 = (np.float64(x1 >> np.uint64(11)) + 0.5) * _INV_2_53
    u2 = np.float64(x2 >> np.uint64(11)) * _INV_2_53
    r = np.sqrt(-2.0 * np.log(u1))
    return r * np.cos(_TWO_PI * u2), r * np.sin(_TWO_PI * u2)


@njit(cache=True)
def fill_normals(key, start, out):
    """Write normals ``start .. start + len(out) - 1`` of a stream into ``out``."""
    n = out.shape[0]
    i = 0
    q = start
    if q & 1 and n > 0:
        out[0] = standard_normal_at(key, q)
        i = 1
        q += 1
    while i + 1 < n:
        z0, z1 = normal_pair(key, q >> 1)
        out[i] = z0
        out[i + 1] = z1
        i += 2
        q += 2
    if i < n:
        out[i] = standard_normal_at(key, q)


@njit(cache=True)
def arm_keys(seed, stream, n_arms):
    base = derive_key(mix64(seed), stream)
    keys = np.empty(n_arms, dtype=np.uint64)
    for a in range(n_arms):
        keys[a] = derive_key(base, np.uint64(a))
    return keys


@njit(cache=True)
def normal_block(key, start, count):
    out = np.empty(count, dtype=np.float64)
    fill_normals(key, start, out)
    return out


def stream_keys(seed, stream, n_arms):
    """Per-arm stream keys for one trial.

    Args:
        seed: master seed (any integer, reduced modulo 2**64).
        stream: trial index.
        n_arms: number of arms.

    Returns:
        uint64 array of length ``n_arms``.
    """
    return arm_keys(np.uint64(int(seed) & MASK64), np.uint64(int(stream) & MASK64), int(n_arms))


def standard_normals(key, start, count):
    """``count`` consecutive standard normals of one stream, from position ``start``."""
    return normal_block(np.uint64(key), np.int64(start), int(count))
