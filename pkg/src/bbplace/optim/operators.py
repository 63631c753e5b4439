"""Variation operators for permutation and box genotypes."""
from __future__ import annotations

import math

import numpy as np

from ..sp import SpGenotype


def inversion(g: SpGenotype, rng, which=None, i=None, j=None) -> SpGenotype:
    """Reverse ``[i, j]`` (inclusive) of one permutation of the pair.

    Unspecified arguments are drawn uniformly.
    """
    out = g.copy()
    k = g.k
    if k < 2:
        return out
    if which is None:
        which = int(rng.integers(2))
    if i is None or j is None:
        i, j = sorted(rng.choice(k, size=2, replace=False).tolist())
    perm = out.pi_plus if which == 0 else out.pi_minus
    perm[i:j + 1] = perm[i:j + 1][::-1].copy()
    return out


def default_shuffle_m(k: int) -> int:
    return min(k, max(2, math.ceil(0.1 * k)))


def shuffle(x, rng, m=None) -> np.ndarray:
    """Cyclically permute the coordinate pairs of ``m`` random macros."""
    x = np.array(x, dtype=np.float64)
    k = len(x) // 2
    if k < 2:
        return x
    m = default_shuffle_m(k) if m is None else min(int(m), k)
    idx = rng.choice(k, size=m, replace=False)
    pairs = x.reshape(k, 2)
    pairs[idx] = pairs[np.roll(idx, 1)].copy()
    return pairs.ravel()


def random_reset(x, lo, hi, rng) -> np.ndarray:
    x = np.array(x, dtype=np.float64)
    i = int(rng.integers(len(x)))
    x[i] = lo[i] + rng.random() * (hi[i] - lo[i])
    return x


def uniform_crossover(a, b, rng) -> np.ndarray:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    return np.where(rng.random(len(a)) < 0.5, a, b)


def order_crossover(a, b, rng, i=None, j=None) -> np.ndarray:
    """OX: keep ``a[i:j+1]`` in place, fill the rest in the order of ``b``."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    k = len(a)
    if i is None or j is None:
        i, j = sorted(rng.integers(k, size=2).tolist())
    child = np.full(k, -1, dtype=np.int64)
    child[i:j + 1] = a[i:j + 1]
    used = np.zeros(k, dtype=bool)
    used[a[i:j + 1]] = True
    rest = b[~used[b]]
    free = np.flatnonzero(child < 0)
    child[free] = rest
    return child
