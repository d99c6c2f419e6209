"""Deterministic random streams.

Every stochastic routine in the package takes an explicit Rng; there is no
global generator. Child streams are derived from (seed, key path) through
numpy's SeedSequence, so the same seed reproduces the same experiment
bit-for-bit regardless of call order elsewhere.
"""

from __future__ import annotations

import zlib

import numpy as np


def _key_to_int(key) -> int:
    if isinstance(key, (int, np.integer)):
        return int(key) & 0xFFFFFFFF
    return zlib.crc32(str(key).encode("utf-8"))


class Rng:
    """PCG64 stream addressed by a 64-bit seed and a derivation key path."""

    def __init__(self, seed: int, _path: tuple = ()):
        self.seed = int(seed)
        self._path = tuple(_path)
        ss = np.random.SeedSequence(entropy=self.seed, spawn_key=self._path)
        self._gen = np.random.Generator(np.random.PCG64(ss))

    def child(self, *keys) -> "Rng":
        """Independent stream for a named sub-task (worker, stage, ...)."""
        return Rng(self.seed, self._path + tuple(_key_to_int(k) for k in keys))

    def uniform(self, low=0.0, high=1.0, size=None):
        return self._gen.uniform(low, high, size)

    def normal(self, loc=0.0, scale=1.0, size=None):
        return self._gen.normal(loc, scale, size)

    def gamma(self, shape, size=None):
        return self._gen.gamma(shape, 1.0, size)

    def integers(self, low, high=None, size=None):
        return self._gen.integers(low, high, size)

    def permutation(self, n):
        return self._gen.permutation(n)

    def __repr__(self):
        return f"Rng(seed={self.seed}, path={self._path})"
