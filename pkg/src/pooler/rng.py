"""
Counter-based deterministic random numbers.

Every draw is a pure function of (seed, stream, i, j): a splitmix64 chain
over numpy uint64 arrays. Draws therefore do not depend on evaluation order
or on how work is split across threads.
"""

import threading
from typing import Union

import numpy as np

ArrayLike = Union[int, np.ndarray]

# Streams keep unrelated draws independent for the same (i, j)
STREAM_POOL = 1
STREAM_PERMANENCE = 2
STREAM_SPLIT = 3

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_SHIFT_30 = np.uint64(30)
_SHIFT_27 = np.uint64(27)
_SHIFT_31 = np.uint64(31)
_SHIFT_11 = np.uint64(11)
_INV_2_53 = 1.0 / float(1 << 53)


def _splitmix(x: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):
        z = x + _GOLDEN
        z = (z ^ (z >> _SHIFT_30)) * _MIX1
        z = (z ^ (z >> _SHIFT_27)) * _MIX2
        return z ^ (z >> _SHIFT_31)


def hash_key(seed: int, stream: int, i: ArrayLike, j: ArrayLike) -> np.ndarray:
    """64-bit hash of (seed, stream, i, j); i and j broadcast"""
    i = np.asarray(i, dtype=np.uint64)
    j = np.asarray(j, dtype=np.uint64)
    base = _splitmix(np.asarray(np.uint64(seed) ^ _splitmix(np.asarray(np.uint64(stream)))))
    return _splitmix(_splitmix(base ^ i) ^ j)


def uniform_from_key(h: np.ndarray) -> np.ndarray:
    """Top 53 bits of a hash as a float in [0, 1)"""
    return (h >> _SHIFT_11).astype(np.float64) * _INV_2_53


class CounterRng:
    """Seeded uniform generator keyed by (stream, i, j).

    `draws` counts the values produced by this instance; `total_draws`
    counts across all instances in the process.
    """

    total_draws = 0
    _lock = threading.Lock()

    def __init__(self, seed: int):
        if not 0 <= int(seed) < 2 ** 64:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
        self.seed = int(seed)
        self.draws = 0

    def uniform(self, stream: int, i: ArrayLike, j: ArrayLike) -> np.ndarray:
        """U(0,1) draws for every broadcast (i, j) pair"""
        values = uniform_from_key(hash_key(self.seed, stream, i, j))
        count = int(np.size(values))
        with CounterRng._lock:
            self.draws += count
            CounterRng.total_draws += count
        return values

    def permutation(self, stream: int, key: int, n: int) -> np.ndarray:
        """Deterministic permutation of range(n) keyed by `key`"""
        if n == 0:
            return np.zeros(0, dtype=np.int64)
        values = self.uniform(stream, key, np.arange(n, dtype=np.uint64))
        return np.argsort(values, kind="stable").astype(np.int64)
