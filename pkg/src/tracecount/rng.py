"""Seeded random streams and exact-rational Bernoulli draws.

Every random decision draws from a substream derived from one user seed:
``substream(root, k1, k2, ...)`` extends the ``spawn_key`` of a
``numpy.random.SeedSequence``, so the stream for a given key path is the same
whatever order (or thread) it is requested in.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

_INT64_LIMIT = 2 ** 63


def root_sequence(seed: int) -> np.random.SeedSequence:
    if seed < 0 or seed >= 2 ** 64:
        raise ValueError("seed must be an unsigned 64-bit integer")
    return np.random.SeedSequence(seed)


def substream(seq: np.random.SeedSequence, *keys: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(seq.entropy, spawn_key=tuple(seq.spawn_key) + tuple(keys))


def generator(seq: np.random.SeedSequence) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seq))


def as_sequence(seed_or_seq) -> np.random.SeedSequence:
    if isinstance(seed_or_seq, np.random.SeedSequence):
        return seed_or_seq
    return root_sequence(int(seed_or_seq))


def uniform_below(rng: np.random.Generator, bound: int) -> int:
    """Uniform integer in ``[0, bound)`` for arbitrarily large ``bound``."""
    if bound <= 0:
        raise ValueError("bound must be positive")
    if bound < _INT64_LIMIT:
        return int(rng.integers(0, bound))
    bits = bound.bit_length()
    words = (bits + 31) // 32
    while True:
        x = 0
        for chunk in rng.integers(0, 2 ** 32, size=words, dtype=np.uint64):
            x = (x << 32) | int(chunk)
        x >>= words * 32 - bits
        if x < bound:
            return x


def bernoulli(rng: np.random.Generator, p: Fraction) -> bool:
    p = Fraction(p)
    if p <= 0:
        return False
    if p >= 1:
        return True
    return uniform_below(rng, p.denominator) < p.numerator


def bernoulli_mask(rng: np.random.Generator, p: Fraction, shape) -> np.ndarray:
    """Boolean array of independent Bernoulli(p) draws; p is an exact rational.

    p = 0 and p = 1 consume no randomness.
    """
    p = Fraction(p)
    if p < 0 or p > 1:
        raise ValueError(f"probability {p} outside [0, 1]")
    if p == 0:
        return np.zeros(shape, dtype=bool)
    if p == 1:
        return np.ones(shape, dtype=bool)
    den = p.denominator
    if den < _INT64_LIMIT:
        return rng.integers(0, den, size=shape, dtype=np.int64) < p.numerator
    flat = [uniform_below(rng, den) < p.numerator for _ in range(int(np.prod(shape)))]
    return np.array(flat, dtype=bool).reshape(shape)


def weighted_choice(rng: np.random.Generator, weights) -> int:
    """Index drawn with probability proportional to non-negative rational weights."""
    weights = [Fraction(w) for w in weights]
    if any(w < 0 for w in weights):
        raise ValueError("negative weight")
    den = math.lcm(*(w.denominator for w in weights))
    ints = [int(w * den) for w in weights]
    total = sum(ints)
    if total == 0:
        raise ValueError("all weights are zero")
    x = uniform_below(rng, total)
    for i, v in enumerate(ints):
        if x < v:
            return i
        x -= v
    raise AssertionError("unreachable")

