"""Deterministic point and direction sampling.

Points are drawn from a Halton sequence over the instance region with a
Cranley-Patterson rotation derived from the manifest seed, so the sample
set is low-discrepancy yet seed-scrambled and fully reproducible.  The
Halton generator is implemented here rather than taken from a library so
that reports stay byte-stable regardless of dependency versions.

Direction draws use numpy Generators seeded from (seed, crc32(label)), so
every check owns an independent, order-insensitive stream.
"""

from __future__ import annotations

import zlib

import numpy as np

from .config import Region

_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53)


def _radical_inverse(base: int, index: int) -> float:
    inv = 0.0
    f = 1.0
    while index > 0:
        f /= base
        inv += f * (index % base)
        index //= base
    return inv


def halton_unit(count: int, dim: int, seed: int) -> np.ndarray:
    """Seed-rotated Halton points in the unit cube, shape (count, dim)."""
    if dim > len(_PRIMES):
        raise ValueError(f"dimension {dim} exceeds supported maximum")
    shift = np.random.default_rng((int(seed), 0x48414C)).random(dim)
    out = np.empty((count, dim))
    for j in range(dim):
        base = _PRIMES[j]
        col = np.array([_radical_inverse(base, i + 1) for i in range(count)])
        out[:, j] = (col + shift[j]) % 1.0
    return out


def halton_points(region: Region, count: int, seed: int) -> np.ndarray:
    """Sample points inside the region box, shape (count, dim)."""
    return region.rescale(halton_unit(count, region.dim, seed))


def check_rng(seed: int, label: str) -> np.random.Generator:
    """Independent generator for one named check."""
    return np.random.default_rng((int(seed), zlib.crc32(label.encode())))
