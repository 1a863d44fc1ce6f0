"""FIR taps, low-pass design and the streaming FIR filter block."""

from __future__ import annotations

import math

import numpy as np

from .. import kernels
from ..runtime import COMPLEX32, INT32, REAL32, Block


class FirTaps:
    """Immutable real-valued tap vector stored as float32."""

    def __init__(self, coefficients):
        c = np.asarray(coefficients, dtype=np.float32).ravel()
        if c.size < 1:
            raise ValueError("FIR needs at least one tap")
        if not np.all(np.isfinite(c)):
            raise ValueError("FIR taps must be finite")
        c.flags.writeable = False
        self._c = c

    @property
    def coefficients(self) -> np.ndarray:
        return self._c

    def __len__(self):
        return self._c.size

    def __iter__(self):
        return iter(self._c)

    def quantized(self, frac_bits: int = 15) -> np.ndarray:
        return np.round(self._c.astype(np.float64) * (1 << frac_bits)).astype(np.int64)


def design_lowpass(cutoff: float, transition: float, sample_rate: float) -> FirTaps:
    """Hamming-windowed sinc low-pass with unity DC gain.

    The passband ends at ``cutoff`` and the stop band starts at
    ``cutoff + transition``. The length is the smallest odd count with
    ``L >= 3.7 fs / transition``; the usual 3.3 factor for Hamming leaves the
    first sidelobe a dB or two short of 50 dB attenuation.
    """
    if not (cutoff > 0 and transition > 0 and cutoff + transition < sample_rate / 2):
        raise ValueError("need 0 < cutoff and cutoff + transition < sample_rate / 2")
    length = int(math.ceil(3.7 * sample_rate / transition))
    if length % 2 == 0:
        length += 1
    fc = (cutoff + transition / 2.0) / sample_rate
    m = np.arange(length) - (length - 1) / 2.0
    h = 2.0 * fc * np.sinc(2.0 * fc * m) * np.hamming(length)
    h = h / h.sum()
    # symmetric after normalisation; force exact mirror for float32 storage
    h = 0.5 * (h + h[::-1])
    return FirTaps(h)


def fir_reference(taps, x) -> np.ndarray:
    """Direct O(N*K) convolution with zero initial state."""
    t = np.asarray(taps, dtype=np.float64)
    x = np.asarray(x)
    y = np.zeros(len(x), dtype=np.result_type(x.dtype, np.float64))
    for n in range(len(x)):
        acc = 0
        for k in range(min(len(t), n + 1)):
            acc += t[k] * x[n - k]
        y[n] = acc
    return y


class FirFilter(Block):
    """Streaming FIR filter ``y[n] = sum_k taps[k] x[n-k]`` with zero initial state.

    ``kind`` selects the stream type: complex32 and real32 use float64
    accumulation, int32 uses Q``frac_bits`` integer taps with a rounded
    right shift (the fixed-point path of a hardware filter).
    """

    def __init__(self, taps, kind=COMPLEX32, name: str = "fir_filter", frac_bits: int = 15):
        super().__init__(name, [kind], [kind])
        self.taps = taps if isinstance(taps, FirTaps) else FirTaps(taps)
        self.kind = kind
        self.frac_bits = frac_bits
        k = len(self.taps)
        if kind == COMPLEX32:
            self._hist = np.zeros(k - 1, dtype=np.complex128)
        elif kind == REAL32:
            self._hist = np.zeros(k - 1, dtype=np.float64)
        elif kind == INT32:
            self._hist = np.zeros(k - 1, dtype=np.int64)
            self._qtaps = self.taps.quantized(frac_bits)
        else:
            raise ValueError(f"unsupported FIR stream kind {kind.name}")
        self._taps64 = self.taps.coefficients.astype(np.float64)

    def filter(self, x: np.ndarray) -> np.ndarray:
        """Filter a chunk, carrying state into the next call."""
        k = len(self.taps)
        xh = np.concatenate([self._hist, np.asarray(x, dtype=self._hist.dtype)])
        if self.kind == COMPLEX32:
            y = kernels.fir_complex(self._taps64, xh)
        elif self.kind == REAL32:
            y = kernels.fir_real(self._taps64, xh)
        else:
            y = kernels.fir_int(self._qtaps, xh, self.frac_bits)
        if k > 1:
            self._hist = xh[len(xh) - (k - 1):].copy()
        return y

    def work(self, inputs, outputs):
        inp, out = inputs[0], outputs[0]
        n = min(len(inp), len(out))
        if n == 0:
            return [0], [0]
        out.items[:n] = self.filter(inp.items[:n])
        out.tags.extend(t for t in inp.tags if t.offset < inp.offset + n)
        return [n], [n]
