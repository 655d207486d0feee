"""Seeded, splittable random streams (Philox counter-based generator)."""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1


def make_rng(seed: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed & MASK64))


def split(seed: int, n: int) -> list[np.random.Generator]:
    """n independent streams derived from one 64-bit seed."""
    children = np.random.SeedSequence(seed & MASK64).spawn(n)
    return [np.random.Generator(np.random.Philox(c)) for c in children]


def randbits(rng: np.random.Generator, nbits: int) -> int:
    """Uniform integer with nbits random bits (arbitrary width)."""
    if nbits <= 0:
        return 0
    words = rng.integers(0, 1 << 32, size=(nbits + 31) // 32, dtype=np.uint64)
    v = 0
    for w in words:
        v = (v << 32) | int(w)
    return v >> (32 * len(words) - nbits)


__all__ = ["make_rng", "split", "randbits"]
