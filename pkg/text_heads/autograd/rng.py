"""
Seeded random generator driving dropout, initialization and shuffles
"""
from typing import List, Sequence, Tuple, TypeVar

import numpy as np


__all__ = ['Rng']


T = TypeVar('T')

SEED_MASK = (1 << 64) - 1


class Rng:
    """
    PCG64 stream keyed by a 64-bit seed, identical seeds give identical draws on every platform
    """

    def __init__(self, seed: int, stream: Tuple[int, ...] = ()):
        self.seed = seed & SEED_MASK
        self.stream = stream
        sequence = np.random.SeedSequence(entropy=self.seed, spawn_key=stream)
        self._generator = np.random.Generator(np.random.PCG64(sequence))

    def spawn(self, key: int) -> 'Rng':
        """
        independent child stream, a pure function of (seed, stream, key)
        """
        return Rng(self.seed, self.stream + (key,))

    def uniform(self, low: float, high: float, shape: Sequence[int]) -> np.ndarray:
        return self._generator.uniform(low, high, size=tuple(shape))

    def normal(self, shape: Sequence[int], std: float = 1.0) -> np.ndarray:
        return self._generator.normal(0.0, std, size=tuple(shape))

    def keep_mask(self, p: float, shape: Sequence[int]) -> np.ndarray:
        """
        boolean mask, every element kept with probability 1 - p
        """
        return self._generator.random(size=tuple(shape)) >= p

    def integers(self, low: int, high: int) -> int:
        return int(self._generator.integers(low, high))

    def permutation(self, n: int) -> List[int]:
        return [int(i) for i in self._generator.permutation(n)]

    def shuffle(self, items: Sequence[T]) -> List[T]:
        return [items[i] for i in self.permutation(len(items))]

    def choice(self, items: Sequence[T]) -> T:
        return items[self.integers(0, len(items))]
