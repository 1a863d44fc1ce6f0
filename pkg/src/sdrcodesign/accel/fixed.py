"""Q1.15 complex samples and the fixed-point radix-2 datapath."""

from __future__ import annotations

import numpy as np

from .. import kernels
from ..dsp.fft import bit_reverse_indices

Q15 = 1 << 15
Q_MIN = -Q15
Q_MAX = Q15 - 1


def quantize(x, full_scale=1.0) -> np.ndarray:
    """Map complex values to Q1.15 I/Q pairs, shape ``x.shape + (2,)`` int16.

    ``full_scale`` (broadcast against ``x``) maps to 1.0. Rounding is to
    nearest with ties to even; values outside [-1, 1) saturate.
    """
    fs = np.asarray(full_scale, dtype=np.float64)
    if np.any(fs <= 0):
        raise ValueError("full_scale must be positive")
    z = np.asarray(np.asarray(x, dtype=np.complex128) / fs)
    shape = z.shape
    z = np.ascontiguousarray(z.reshape(-1))
    q = np.rint(z.view(np.float64).reshape(shape + (2,)) * Q15)
    np.clip(q, Q_MIN, Q_MAX, out=q)
    return q.astype(np.int16)


def dequantize(q, full_scale=1.0) -> np.ndarray:
    q = np.asarray(q)
    if q.shape[-1] != 2:
        raise ValueError("fixed-point buffers end in an I/Q axis of length 2")
    f = np.ascontiguousarray(q, dtype=np.float64).reshape(-1, 2)
    z = f.view(np.complex128)[:, 0].reshape(q.shape[:-1]) * (1.0 / Q15)
    return z * np.asarray(full_scale, dtype=np.float64)


def default_schedule(log2n: int) -> tuple:
    """One bit of right shift per stage: total gain 1/N, never overflows."""
    return (1,) * log2n


def pack_schedule(shifts) -> int:
    word = 0
    for i, s in enumerate(shifts):
        if not 0 <= int(s) <= 3:
            raise ValueError("per-stage shift must be 0..3")
        word |= int(s) << (2 * i)
    return word


def unpack_schedule(word: int, log2n: int) -> tuple:
    return tuple((int(word) >> (2 * i)) & 3 for i in range(log2n))


_TWIDDLES: dict = {}


def _twiddles(n: int, inverse: bool):
    key = (n, inverse)
    tw = _TWIDDLES.get(key)
    if tw is None:
        sign = 1.0 if inverse else -1.0
        w = np.exp(sign * 2j * np.pi * np.arange(n // 2) / n)
        tw = (np.rint(w.real * Q15).astype(np.int64), np.rint(w.imag * Q15).astype(np.int64))
        _TWIDDLES[key] = tw
    return tw


def fixed_fft(q, inverse: bool = False, shifts=None) -> tuple[np.ndarray, bool]:
    """Radix-2 DIT transform of Q1.15 vectors, shape (..., N, 2).

    Each stage rounds once (half away from zero) after its scheduled right
    shift and saturates to 16 bits. No other scaling is applied, so the
    inverse is unnormalised apart from the schedule.

    Returns
    -------
    (numpy.ndarray, bool)
        int16 output of the same shape and whether any stage saturated.
    """
    q = np.asarray(q)
    n = q.shape[-2]
    log2n = n.bit_length() - 1
    if n < 2 or 1 << log2n != n:
        raise ValueError(f"size {n} is not a power of two")
    shifts = default_schedule(log2n) if shifts is None else tuple(shifts)
    if len(shifts) != log2n:
        raise ValueError(f"schedule needs {log2n} stages")
    perm = bit_reverse_indices(n)
    flat = q.reshape(-1, n, 2)
    re = np.ascontiguousarray(flat[:, perm, 0], dtype=np.int64)
    im = np.ascontiguousarray(flat[:, perm, 1], dtype=np.int64)
    tw_re, tw_im = _twiddles(n, inverse)
    overflow = kernels.fixed_fft(re, im, tw_re, tw_im, np.asarray(shifts, dtype=np.int64))
    out = np.stack([re, im], axis=-1).astype(np.int16).reshape(q.shape)
    return out, bool(overflow)
