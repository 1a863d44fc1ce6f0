"""Least-squares channel estimation and pilot-tracked equalization."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .coding import PILOT_POLARITY
from .frame import FrameError
from .params import DEFAULT_PARAMS, LTF_FREQ, PILOT_VALUES, TIME_SCALE, OfdmParams

MIN_GAIN = 1e-6


@dataclass
class ChannelEstimate:
    """Per-bin gain (zero on null bins) plus the last pilot tracking state."""

    h: np.ndarray
    residual_phase: float = 0.0
    residual_slope: float = 0.0

    def gains(self, params: OfdmParams = DEFAULT_PARAMS) -> np.ndarray:
        """Gains on the 52 occupied carriers, ordered from -26 to 26."""
        return self.h[params.bins(params.occupied_carriers)]

    def csi(self, params: OfdmParams = DEFAULT_PARAMS) -> np.ndarray:
        """Data-carrier reliabilities ``|H|^2`` scaled to unit mean."""
        p = np.abs(self.h[params.data_bins]) ** 2
        return p / p.mean()


def estimate_channel(ltf_freq, params: OfdmParams = DEFAULT_PARAMS) -> ChannelEstimate:
    """Average the two LTF observations and divide by the known symbol.

    ``ltf_freq`` holds the unscaled 64-point FFTs of both LTF periods. The
    reference includes the transmitter's time-domain scaling, so an ideal
    channel estimates as exactly 1.
    """
    y = np.asarray(ltf_freq, dtype=np.complex128).reshape(2, params.fft_size)
    occ = params.bins(params.occupied_carriers)
    h = np.zeros(params.fft_size, dtype=np.complex128)
    h[occ] = y[:, occ].mean(axis=0) / (LTF_FREQ[occ] * TIME_SCALE)
    if not np.all(np.isfinite(h[occ])) or np.min(np.abs(h[occ])) < MIN_GAIN:
        raise FrameError("degenerate-channel")
    return ChannelEstimate(h)


def equalize_block(symbols_freq, est: ChannelEstimate, first_index: int,
                   params: OfdmParams = DEFAULT_PARAMS) -> np.ndarray:
    """Equalize a batch of OFDM symbols, shape (n, 64) -> (n, 48).

    Row ``i`` is symbol ``first_index + i`` (SIGNAL is 0). The four pilots
    give a common phase and a linear phase slope over carrier index for
    each symbol; both are removed from the data carriers.
    """
    y = np.atleast_2d(np.asarray(symbols_freq, dtype=np.complex128))
    h = est.h * TIME_SCALE
    pb, db = params.pilot_bins, params.data_bins
    kp = np.asarray(params.pilot_carriers, dtype=np.float64)
    kd = np.asarray(params.data_carriers, dtype=np.float64)
    pol = PILOT_POLARITY[(first_index + np.arange(len(y))) % 127]
    expected = pol[:, None] * np.asarray(PILOT_VALUES)[None, :]
    p = y[:, pb] / h[pb] * expected
    common = p.sum(axis=1)
    if np.any(np.abs(common) < MIN_GAIN):
        raise FrameError("pilot", "degenerate pilot magnitude")
    phase = np.angle(common)
    resid = np.angle(p * np.exp(-1j * phase)[:, None])
    slope = resid @ kp / (kp @ kp)
    est.residual_phase = float(phase[-1])
    est.residual_slope = float(slope[-1])
    rot = np.exp(-1j * (phase[:, None] + slope[:, None] * kd[None, :]))
    return y[:, db] / h[db] * rot


def equalize(symbol_freq, est: ChannelEstimate, symbol_index: int,
             params: OfdmParams = DEFAULT_PARAMS) -> np.ndarray:
    """Equalize one 64-bin symbol and return its 48 data carriers."""
    return equalize_block(np.asarray(symbol_freq)[None, :], est, symbol_index, params)[0]
