"""
Seeded random stream used by every stochastic operation
"""
import numpy as np


class RngStream:
    """
    Deterministic random stream over numpy's PCG64

    Identical seeds give identical draw sequences. Streams are confined to
    one run; use child() to derive independent streams for parallel jobs.
    """

    def __init__(self, seed=0):
        self.seed = int(seed) & 0xFFFFFFFFFFFFFFFF
        self._gen = np.random.Generator(np.random.PCG64(self.seed))

    def random(self, size=None):
        """Uniform floats in [0, 1)"""
        return self._gen.random(size)

    def integers(self, low, high=None, size=None):
        """Uniform integers in [low, high)"""
        return self._gen.integers(low, high, size=size)

    def permutation(self, n):
        return self._gen.permutation(n)

    def choice(self, n, size, replace=True):
        """Indices drawn from range(n)"""
        return self._gen.choice(n, size=size, replace=replace)

    def coin(self):
        """Fair coin flip"""
        return bool(self._gen.random() < 0.5)

    def bits(self, shape):
        """Uniform random bits as a uint8 array"""
        return self._gen.integers(0, 2, size=shape, dtype=np.uint8)

    def child(self, *keys):
        """
        Derive an independent stream from this stream's seed and integer keys

        The result depends only on (seed, keys), never on how many draws were
        already taken, so jobs can be seeded in any order.
        """
        seq = np.random.SeedSequence(self.seed, spawn_key=tuple(int(k) for k in keys))
        return RngStream(int(seq.generate_state(1, np.uint64)[0]))

    def __repr__(self):
        return f'RngStream(seed={self.seed})'
