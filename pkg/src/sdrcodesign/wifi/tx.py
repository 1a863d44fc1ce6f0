"""Reference transmitter used as the receiver's oracle."""

from __future__ import annotations

import numpy as np

from .coding import PILOT_POLARITY, bytes_to_bits, conv_encode, interleave, puncture, scramble
from .frame import SERVICE_BITS, TAIL_BITS, n_data_symbols, signal_field
from .modulation import map_bits
from .params import (
    DEFAULT_PARAMS,
    PILOT_VALUES,
    STF_TIME,
    TIME_SCALE,
    OfdmParams,
    ltf_time,
    mcs,
)

DEFAULT_SEED = 0x5D


def pilot_symbols(symbol_index: int) -> np.ndarray:
    """Pilot values on (-21, -7, 7, 21) for OFDM symbol ``symbol_index`` (SIGNAL is 0)."""
    return np.asarray(PILOT_VALUES) * PILOT_POLARITY[symbol_index % 127]


def ofdm_symbols(data_points: np.ndarray, first_index: int, params: OfdmParams = DEFAULT_PARAMS) -> np.ndarray:
    """Modulate rows of 48 data points into CP-prefixed time symbols (flattened)."""
    data_points = np.atleast_2d(data_points)
    n_sym = data_points.shape[0]
    n = params.fft_size
    freq = np.zeros((n_sym, n), dtype=np.complex128)
    freq[:, params.data_bins] = data_points
    polarity = PILOT_POLARITY[(first_index + np.arange(n_sym)) % 127]
    freq[:, params.pilot_bins] = polarity[:, None] * np.asarray(PILOT_VALUES)[None, :]
    t = np.fft.ifft(freq, axis=1) * TIME_SCALE
    sym = np.concatenate([t[:, n - params.cp_len:], t], axis=1)
    return sym.ravel()


def data_bits(psdu: bytes, m, scrambler_seed: int = DEFAULT_SEED) -> np.ndarray:
    """SERVICE + PSDU + tail + pad, scrambled, tail re-zeroed."""
    m = mcs(m)
    n_sym = n_data_symbols(len(psdu), m)
    total = n_sym * m.n_dbps
    bits = np.zeros(total, dtype=np.uint8)
    payload = bytes_to_bits(psdu)
    bits[SERVICE_BITS:SERVICE_BITS + len(payload)] = payload
    out = scramble(bits, scrambler_seed)
    tail = SERVICE_BITS + len(payload)
    out[tail:tail + TAIL_BITS] = 0
    return out


def data_points(psdu: bytes, m, scrambler_seed: int = DEFAULT_SEED) -> np.ndarray:
    """Constellation points of the DATA field, shape (n_sym, 48)."""
    m = mcs(m)
    coded = puncture(conv_encode(data_bits(psdu, m, scrambler_seed)), m.code_rate)
    coded = interleave(coded, m.n_bpsc)
    return map_bits(coded, m.modulation).reshape(-1, 48)


def signal_points(m, length: int) -> np.ndarray:
    coded = conv_encode(signal_field(mcs(m), length).bits())
    return map_bits(interleave(coded, 1), "BPSK")


def encode_frame(psdu: bytes, m, params: OfdmParams = DEFAULT_PARAMS,
                 scrambler_seed: int = DEFAULT_SEED) -> np.ndarray:
    """Baseband samples of one PPDU: STF, LTF, SIGNAL and DATA symbols.

    Parameters
    ----------
    psdu : bytes
        1 to 4095 bytes, including any FCS the caller wants carried.
    m : Mcs or str
    scrambler_seed : int
        Nonzero 7-bit initial scrambler state.

    Returns
    -------
    numpy.ndarray of complex64
    """
    psdu = bytes(psdu)
    m = mcs(m)
    if params.fft_size != 64:
        raise ValueError("the transmitter supports the 64-point numerology only")
    if not 1 <= len(psdu) <= 4095:
        raise ValueError(f"PSDU length {len(psdu)} outside 1..4095")
    if not 1 <= int(scrambler_seed) <= 127:
        raise ValueError("scrambler seed must be in 1..127")
    sig = ofdm_symbols(signal_points(m, len(psdu)), 0, params)
    data = ofdm_symbols(data_points(psdu, m, scrambler_seed), 1, params)
    return np.concatenate([STF_TIME, ltf_time(), sig, data]).astype(np.complex64)
