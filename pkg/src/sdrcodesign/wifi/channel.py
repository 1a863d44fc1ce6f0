"""Channel impairments for loopback and PER experiments."""

from __future__ import annotations

import math

import numpy as np

from ..dsp.rng import GaussianStream
from .params import DEFAULT_PARAMS


def apply_channel(samples, cfo: float = 0.0, snr_db: float = math.inf, taps=(1.0,),
                  start_pad: int = 0, seed: int = 0,
                  sample_rate: float = DEFAULT_PARAMS.sample_rate) -> np.ndarray:
    """Multipath, CFO, a leading pad and AWGN, in that order.

    The pad is filled with the same noise as the rest of the output (zeros
    when ``snr_db`` is infinite). Noise power is set from the mean power of
    the nonzero convolved samples so that the signal portion sits at
    ``snr_db``. Output length is ``start_pad + len(samples) + len(taps) - 1``.
    """
    x = np.asarray(samples, dtype=np.complex128)
    h = np.asarray(taps, dtype=np.complex128).ravel()
    if h.size == 0:
        raise ValueError("taps must be non-empty")
    if math.isnan(snr_db):
        raise ValueError("snr_db must not be NaN")
    if start_pad < 0:
        raise ValueError("start_pad must be non-negative")
    y = np.convolve(x, h) if h.size > 1 else x * h[0]
    if cfo:
        n = np.arange(len(y), dtype=np.float64)
        y = y * np.exp(2j * np.pi * np.mod(cfo * n / sample_rate, 1.0))
    y = np.concatenate([np.zeros(int(start_pad), np.complex128), y])
    if math.isfinite(snr_db):
        active = y[np.abs(y) > 0]
        p_sig = float(np.mean(np.abs(active) ** 2)) if active.size else 0.0
        sigma = math.sqrt(p_sig / 10.0 ** (snr_db / 10.0) / 2.0)
        y = y + sigma * GaussianStream(seed).complex_normal(len(y))
    return y.astype(np.complex64)
