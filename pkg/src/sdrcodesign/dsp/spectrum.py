"""Averaged-periodogram sink (the file-based stand-in for an FFT plot)."""

from __future__ import annotations

import csv
import io

import numpy as np

from ..runtime import COMPLEX32, REAL32, Block
from .fft import SoftwareFftBackend


class SpectrumSink(Block):
    """Average ``|FFT|^2`` of Hann-windowed, non-overlapping frames.

    Real input yields the one-sided spectrum (bins 0..N/2); complex input
    keeps all N bins in natural FFT order. ``backend`` is any object with a
    ``transform(batch, inverse=False)`` method.
    """

    def __init__(self, fft_size: int, kind=REAL32, backend=None, sample_rate: float = 1.0,
                 name: str = "spectrum_sink"):
        super().__init__(name, [kind], [])
        self.fft_size = int(fft_size)
        self.kind = kind
        self.backend = backend or SoftwareFftBackend()
        self.sample_rate = float(sample_rate)
        self.window = np.hanning(self.fft_size)
        self._partial = np.zeros(0, dtype=np.complex128)
        self._acc = np.zeros(self.fft_size)
        self.frames = 0

    def work(self, inputs, outputs):
        inp = inputs[0]
        n = len(inp)
        if n == 0:
            return [0], []
        buf = np.concatenate([self._partial, np.asarray(inp.items, dtype=np.complex128)])
        nf = len(buf) // self.fft_size
        if nf:
            frames = buf[: nf * self.fft_size].reshape(nf, self.fft_size) * self.window
            spec = np.asarray(self.backend.transform(frames.astype(np.complex64)), dtype=np.complex128)
            cost = getattr(self.backend, "last_cost", None)
            if cost is not None:
                self.report_offload(*cost)
            self._acc += np.sum(np.abs(spec) ** 2, axis=0)
            self.frames += nf
        self._partial = buf[nf * self.fft_size:]
        return [n], []

    def power(self) -> np.ndarray:
        p = self._acc / max(self.frames, 1)
        if self.kind == REAL32:
            p = p[: self.fft_size // 2 + 1]
        return p

    def frequencies(self) -> np.ndarray:
        k = np.arange(len(self.power()))
        if self.kind == COMPLEX32:
            k = np.where(k < self.fft_size // 2, k, k - self.fft_size)
        return k * self.sample_rate / self.fft_size

    def spectrum_db(self, floor: float = 1e-30) -> np.ndarray:
        return 10.0 * np.log10(np.maximum(self.power(), floor))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["bin", "frequency_hz", "power_db"])
        for i, (f, p) in enumerate(zip(self.frequencies(), self.spectrum_db())):
            w.writerow([i, f"{f:.6f}", f"{p:.4f}"])
        return buf.getvalue()
