"""Counter-based random numbers for reproducible Monte-Carlo cascades.

A replication is identified by a 64-bit key derived from ``(master_seed, r)``.
Every arc gets a uniform draw that is a pure function of ``(key, arc_id)``, so a
replication is a fixed live-edge world no matter which thread runs it or in
which order arcs are examined.
"""

import numpy as np
from numba import njit

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_ARC_SALT = np.uint64(0xD1B54A32D192ED03)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_INV53 = 1.0 / 9007199254740992.0

MASK64 = (1 << 64) - 1


@njit(cache=True, inline="always")
def mix64(z):
    # splitmix64 finalizer
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


@njit(cache=True, inline="always")
def substream_key(master, r):
    # replication r's stream seed is output r of a splitmix64 stream seeded by master
    return mix64(mix64(master) + (np.uint64(r) + np.uint64(1)) * _GOLDEN)


@njit(cache=True, inline="always")
def arc_uniform(key, arc):
    """Uniform in [0, 1) for arc ``arc`` in the world identified by ``key``.

    This is output ``arc`` of a splitmix64 stream seeded with ``key``.
    """
    h = mix64(key + (np.uint64(arc) + np.uint64(1)) * _GOLDEN)
    return float(h >> _S11) * _INV53


def as_seed(master_seed: int) -> np.uint64:
    return np.uint64(int(master_seed) & MASK64)
