"""Seeded random number generation for reproducible runs."""
import numpy as np

#: identifies the bit generator in run metadata, so a reimplementation elsewhere can
#: tell whether a divergence comes from the generator or from the model
ALGORITHM = "numpy.PCG64"


class SeededRNG:
    """Wrapper around a numpy PCG64 generator. The same seed always yields the same
    stream, on every platform numpy supports.

    :param seed: A non-negative integer seed.
    """

    algorithm = ALGORITHM

    def __init__(self, seed: int):
        if seed < 0:
            raise ValueError(f"seed must be non-negative, got {seed}")
        self._seed = seed
        self._gen = np.random.Generator(np.random.PCG64(seed))

    @property
    def seed(self) -> int:
        return self._seed

    @property
    def generator(self) -> np.random.Generator:
        return self._gen

    def standard_normal(self, size: int | tuple[int, ...]) -> np.ndarray:
        return self._gen.standard_normal(size)
