"""Preamble detection, CFO correction and LTF symbol alignment."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .. import kernels
from .frame import FrameError
from .params import DEFAULT_PARAMS, LTF_TIME, OfdmParams

STF_LAG = 16
DEFAULT_THRESHOLD = 0.56
DEFAULT_PLATEAU = 16
DEFAULT_WINDOW = 48
DEFAULT_HOLDOFF = 320
ALIGN_SEARCH = 320
ALIGN_THRESHOLD = 0.5


@dataclass(frozen=True)
class Trigger:
    """A detected preamble: ``index`` is where the plateau completed."""

    index: int
    cfo: float
    metric: float


class FrameDetector:
    """Streaming lag-16 autocorrelation detector.

    A trigger fires once the normalised autocorrelation has stayed above
    ``threshold`` for ``plateau`` consecutive samples. The detector re-arms
    only after the metric falls below the threshold, and ignores plateaus
    that complete within ``holdoff`` samples of the previous trigger.
    """

    def __init__(self, params: OfdmParams = DEFAULT_PARAMS, threshold: float = DEFAULT_THRESHOLD,
                 plateau: int = DEFAULT_PLATEAU, window: int = DEFAULT_WINDOW,
                 holdoff: int = DEFAULT_HOLDOFF):
        if not 0.0 < threshold < 1.0:
            raise ValueError("threshold must lie in (0, 1)")
        if plateau < 1 or window < 1:
            raise ValueError("plateau and window must be positive")
        self.params = params
        self.threshold = threshold
        self.plateau = plateau
        self.window = window
        self.holdoff = holdoff
        self.reset()

    def reset(self):
        self._hist = np.zeros(STF_LAG + self.window - 1, dtype=np.complex128)
        self._pos = 0
        self._run = 0
        self._run_c = np.zeros(0, dtype=np.complex128)
        self._run_r = np.zeros(0)
        self._armed = True
        self._last = None

    def _cfo(self, c_sum: complex) -> float:
        return float(-np.angle(c_sum) / (2.0 * np.pi * STF_LAG / self.params.sample_rate))

    def process(self, samples) -> list:
        """Feed the next chunk; return the triggers completed inside it."""
        x = np.asarray(samples, dtype=np.complex128)
        n = len(x)
        if n == 0:
            return []
        xh = np.concatenate([self._hist, x])
        c, ratio = kernels.autocorr(xh, STF_LAG, self.window)
        self._hist = xh[n:].copy()
        base = self._pos
        self._pos += n

        above = ratio > self.threshold
        edges = np.flatnonzero(above[1:] != above[:-1]) + 1
        starts = np.concatenate([[0], edges])
        ends = np.concatenate([edges, [n]])
        found = []
        for s, e in zip(starts, ends):
            if not above[s]:
                self._run = 0
                self._run_c = self._run_c[:0]
                self._run_r = self._run_r[:0]
                self._armed = True
                continue
            pos = s + max(self.plateau - self._run, 1) - 1
            if self._armed and self._last is not None:
                pos = max(pos, self._last + self.holdoff - base)
            if self._armed and pos < e:
                run_c = np.concatenate([self._run_c, c[s:pos + 1]])[-self.plateau:]
                run_r = np.concatenate([self._run_r, ratio[s:pos + 1]])[-self.plateau:]
                idx = base + int(pos)
                found.append(Trigger(idx, self._cfo(run_c.sum()), float(run_r.mean())))
                self._armed = False
                self._last = idx
            self._run += int(e - s)
            self._run_c = np.concatenate([self._run_c, c[s:e]])[-self.plateau:]
            self._run_r = np.concatenate([self._run_r, ratio[s:e]])[-self.plateau:]
        return found


def autocorr_ratio(samples, window: int = DEFAULT_WINDOW) -> np.ndarray:
    """Normalised lag-16 autocorrelation of a whole capture (zero history)."""
    x = np.asarray(samples, dtype=np.complex128)
    xh = np.concatenate([np.zeros(STF_LAG + window - 1, np.complex128), x])
    return kernels.autocorr(xh, STF_LAG, window)[1]


def detect_frame(samples, params: OfdmParams = DEFAULT_PARAMS, threshold: float = DEFAULT_THRESHOLD,
                 plateau: int = DEFAULT_PLATEAU, window: int = DEFAULT_WINDOW,
                 holdoff: int = DEFAULT_HOLDOFF) -> list:
    """All preamble triggers in ``samples`` with their coarse CFO estimates."""
    det = FrameDetector(params, threshold, plateau, window, holdoff)
    return det.process(samples)


def correct_cfo(samples, cfo: float, sample_rate: float = DEFAULT_PARAMS.sample_rate,
                start_index: int = 0) -> np.ndarray:
    """Rotate by ``exp(-j 2 pi cfo n / fs)`` with ``n`` counted from ``start_index``."""
    x = np.asarray(samples)
    if cfo == 0:
        return x.copy()
    n = np.arange(start_index, start_index + len(x), dtype=np.float64)
    cycles = np.mod(cfo * n / sample_rate, 1.0)
    out = x * np.exp(-2j * np.pi * cycles)
    return out.astype(np.result_type(x.dtype, np.complex64))


class CfoCorrector:
    """Phase-continuous CFO rotation over a chunked stream."""

    def __init__(self, sample_rate: float = DEFAULT_PARAMS.sample_rate):
        self.sample_rate = sample_rate
        self.cfo = 0.0
        self.reference = 0

    def retune(self, cfo: float, reference: int) -> None:
        """Use ``cfo`` from absolute index ``reference`` onwards (phase zero there)."""
        self.cfo = float(cfo)
        self.reference = int(reference)

    def process(self, samples, offset: int) -> np.ndarray:
        return correct_cfo(samples, self.cfo, self.sample_rate, offset - self.reference)


class AlignmentError(FrameError):
    pass


@dataclass(frozen=True)
class Alignment:
    """``start`` is the first sample of the first full LTF period."""

    start: int
    cfo: float
    peak: float

    @property
    def frame_start(self) -> int:
        return self.start - 192


def align_symbols(samples, trigger, params: OfdmParams = DEFAULT_PARAMS,
                  search: int = ALIGN_SEARCH, threshold: float = ALIGN_THRESHOLD) -> Alignment:
    """Locate the LTF by cross-correlation with one known LTF period.

    The metric ``|c[m]| + |c[m + 64]|`` peaks where both LTF periods line up;
    it is normalised by the window energies so that a perfect match scores 1.
    The fine CFO comes from the phase between the two periods.
    """
    t = int(getattr(trigger, "index", trigger))
    x = np.asarray(samples, dtype=np.complex128)
    n = params.fft_size
    need = t + search + 2 * n - 1
    if t < 0 or need > len(x):
        raise AlignmentError("truncated", f"need samples up to {need}, have {len(x)}")
    seg = x[t:need]
    win = sliding_window_view(seg, n)
    ref = LTF_TIME
    c = win @ np.conj(ref)
    energy = np.sqrt(np.maximum(np.einsum("ij,ij->i", win, np.conj(win)).real, 0.0))
    metric = np.abs(c[:search]) + np.abs(c[n:n + search])
    denom = np.linalg.norm(ref) * (energy[:search] + energy[n:n + search])
    m = int(np.argmax(metric))
    peak = float(metric[m] / denom[m]) if denom[m] > 0 else 0.0
    if peak < threshold:
        raise AlignmentError("no-ltf", f"correlation peak {peak:.3f} below {threshold}")
    a = seg[m:m + n]
    b = seg[m + n:m + 2 * n]
    phase = np.angle(np.vdot(a, b))
    cfo = float(phase / (2.0 * np.pi * n / params.sample_rate))
    return Alignment(t + m, cfo, peak)
