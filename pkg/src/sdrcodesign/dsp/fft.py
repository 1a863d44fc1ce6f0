"""Iterative radix-2 FFT with per-plan twiddle tables."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

FORWARD = "forward"
INVERSE = "inverse"


def is_pow2(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


def bit_reverse_indices(n: int) -> np.ndarray:
    bits = n.bit_length() - 1
    idx = np.arange(n)
    rev = np.zeros(n, dtype=np.int64)
    for b in range(bits):
        rev |= ((idx >> b) & 1) << (bits - 1 - b)
    return rev


@dataclass(frozen=True)
class FftPlan:
    """Immutable transform description.

    ``scale_inverse`` applies 1/N on the inverse transform; the forward
    transform is never scaled.
    """

    size: int
    direction: str = FORWARD
    scale_inverse: bool = True
    _perm: np.ndarray = field(init=False, repr=False, compare=False)
    _twiddles: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not (isinstance(self.size, (int, np.integer)) and self.size >= 2 and is_pow2(self.size)):
            raise ValueError(f"FFT size must be a power of two >= 2, got {self.size}")
        if self.direction not in (FORWARD, INVERSE):
            raise ValueError(f"unknown direction {self.direction!r}")
        sign = -1.0 if self.direction == FORWARD else 1.0
        k = np.arange(self.size // 2)
        object.__setattr__(self, "_perm", bit_reverse_indices(self.size))
        object.__setattr__(self, "_twiddles", np.exp(sign * 2j * np.pi * k / self.size))

    @property
    def inverse(self) -> bool:
        return self.direction == INVERSE

    def execute(self, x: np.ndarray) -> np.ndarray:
        """Transform the last axis of ``x`` (any leading batch shape)."""
        x = np.asarray(x)
        if x.shape[-1] != self.size:
            raise ValueError(f"input length {x.shape[-1]} does not match plan size {self.size}")
        out_dtype = np.complex64 if x.dtype in (np.complex64, np.float32) else np.complex128
        lead = x.shape[:-1]
        n = self.size
        a = np.asarray(x, dtype=np.complex128).reshape(-1, n)[:, self._perm]
        half = 1
        while half < n:
            span = 2 * half
            w = self._twiddles[:: n // span][:half]
            a = a.reshape(-1, n // span, span)
            top = a[:, :, :half]
            bot = a[:, :, half:] * w
            a = np.concatenate([top + bot, top - bot], axis=2)
            half = span
        a = a.reshape(lead + (n,))
        if self.inverse and self.scale_inverse:
            a = a / n
        return a.astype(out_dtype, copy=False)


_PLANS: dict = {}


def plan(size: int, direction: str = FORWARD, scale_inverse: bool = True) -> FftPlan:
    key = (int(size), direction, scale_inverse)
    p = _PLANS.get(key)
    if p is None:
        p = _PLANS[key] = FftPlan(int(size), direction, scale_inverse)
    return p


def fft(plan_or_size, x: np.ndarray) -> np.ndarray:
    p = plan_or_size if isinstance(plan_or_size, FftPlan) else plan(plan_or_size)
    return p.execute(x)


def ifft(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x)
    return plan(x.shape[-1], INVERSE).execute(x)


class SoftwareFftBackend:
    """Host FFT backend: ``transform(batch, inverse=False)`` over the last axis.

    ``last_cost`` is always None; device backends set it to
    ``(modeled_s, emulated_s)`` after each call.
    """

    name = "software"
    last_cost = None

    def transform(self, x, inverse: bool = False) -> np.ndarray:
        return plan(np.shape(x)[-1], INVERSE if inverse else FORWARD).execute(x)
