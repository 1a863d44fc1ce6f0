"""Portable Gaussian noise stream.

Raw 64-bit words come from PCG64 (numpy's ``PCG64`` bit generator seeded
through ``SeedSequence``). Each complex sample consumes two words ``w1, w2``:

    u1 = ((w1 >> 11) + 1) * 2**-53      in (0, 1]
    u2 = (w2 >> 11) * 2**-53            in [0, 1)
    z  = sqrt(-2 ln u1) * (cos 2 pi u2 + j sin 2 pi u2)

so both components are independent unit-variance normals (Box-Muller).
"""

import numpy as np

_SCALE = 2.0 ** -53


class GaussianStream:
    """Deterministic stream of complex normals; chunking never changes the sequence."""

    def __init__(self, seed: int):
        self.seed = int(seed) & 0xFFFFFFFFFFFFFFFF
        self._bitgen = np.random.PCG64(self.seed)

    def words(self, n: int) -> np.ndarray:
        return self._bitgen.random_raw(n)

    def complex_normal(self, n: int) -> np.ndarray:
        if n <= 0:
            return np.zeros(0, dtype=np.complex128)
        w = self.words(2 * n).reshape(n, 2)
        u1 = ((w[:, 0] >> np.uint64(11)).astype(np.float64) + 1.0) * _SCALE
        u2 = (w[:, 1] >> np.uint64(11)).astype(np.float64) * _SCALE
        r = np.sqrt(-2.0 * np.log(u1))
        theta = 2.0 * np.pi * u2
        return r * np.cos(theta) + 1j * (r * np.sin(theta))
