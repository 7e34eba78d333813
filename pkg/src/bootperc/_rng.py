"""Counter-free splitmix64 streams usable from inside numba kernels.

Every random draw in the package goes through a one-element ``uint64`` state
array advanced by :func:`next_u64`.  Child seeds are derived with
:func:`derive_seed`, which folds a path of integers (run index, stream id)
into a base seed using the splitmix64 finalizer, so run ``k`` of an ensemble
is reproducible on its own and independent of scheduling.

Scheme version is embedded in every emitted summary; bump it if the
derivation or the draw order inside any kernel changes.
"""

import numpy as np
from numba import njit

SEED_SCHEME = "splitmix64-path/v1"

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB

GAMMA = np.uint64(_GAMMA)
M1 = np.uint64(_M1)
M2 = np.uint64(_M2)
S30 = np.uint64(30)
S27 = np.uint64(27)
S31 = np.uint64(31)
S11 = np.uint64(11)
INV53 = 1.0 / 9007199254740992.0


def mix64_py(z: int) -> int:
    """splitmix64 finalizer on Python ints (reference for the jitted copy)."""
    z &= _MASK
    z = ((z ^ (z >> 30)) * _M1) & _MASK
    z = ((z ^ (z >> 27)) * _M2) & _MASK
    return z ^ (z >> 31)


def derive_seed(base: int, *path: int) -> int:
    """Fold ``path`` into ``base``: h <- mix(h ^ mix(x + gamma)) per element."""
    h = int(base) & _MASK
    for x in path:
        h = mix64_py(h ^ mix64_py((int(x) + _GAMMA) & _MASK))
    return h


def as_seed(seed) -> int:
    if seed is None:
        raise ValueError("seed is required")
    return int(seed) & _MASK


@njit(cache=True)
def mix64(z):
    z = (z ^ (z >> S30)) * M1
    z = (z ^ (z >> S27)) * M2
    return z ^ (z >> S31)


@njit(cache=True)
def derive2(base, a, b):
    h = np.uint64(base)
    h = mix64(h ^ mix64(np.uint64(a) + GAMMA))
    h = mix64(h ^ mix64(np.uint64(b) + GAMMA))
    return h


@njit(cache=True)
def new_state(seed):
    st = np.empty(1, dtype=np.uint64)
    st[0] = np.uint64(seed)
    return st


@njit(cache=True)
def next_u64(st):
    st[0] = st[0] + GAMMA
    return mix64(st[0])


@njit(cache=True)
def uniform(st):
    """Uniform double on [0, 1) with 53 random bits."""
    return float(next_u64(st) >> S11) * INV53


@njit(cache=True)
def randbelow(st, k):
    """Integer in [0, k); bias is below 2**-53 * k."""
    j = np.int64(uniform(st) * k)
    if j >= k:
        j = k - 1
    return j
