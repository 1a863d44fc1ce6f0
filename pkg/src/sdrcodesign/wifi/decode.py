"""SIGNAL and DATA field decoding down to PSDU bytes."""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .coding import bits_to_bytes, check_fcs, deinterleave, descramble, viterbi_decode
from .frame import (
    FCS_BYTES,
    MAX_PSDU,
    SERVICE_BITS,
    TAIL_BITS,
    FrameError,
    FrameEvent,
    SignalField,
    n_data_symbols,
    parse_signal,
)
from .modulation import demap
from .params import Mcs


def decode_signal(soft_bits) -> SignalField:
    """Decode the 48 BPSK soft metrics of the SIGNAL symbol."""
    soft = np.asarray(soft_bits, dtype=np.float64).ravel()
    if soft.size != 48:
        raise FrameError("signal-size", f"expected 48 soft bits, got {soft.size}")
    bits = viterbi_decode(deinterleave(soft, 1), Fraction(1, 2), 24)
    return parse_signal(bits)


def decode_data(points, m: Mcs, length: int, csi=None) -> tuple[bytes, int]:
    """Recover the PSDU from equalized DATA points of shape (n_sym, 48).

    Returns ``(psdu, scrambler_seed)``.
    """
    if not 1 <= length <= MAX_PSDU:
        raise FrameError("length", f"{length} outside 1..{MAX_PSDU}")
    pts = np.asarray(points).reshape(-1, 48)
    n_sym = n_data_symbols(length, m)
    if len(pts) < n_sym:
        raise FrameError("truncated", f"{len(pts)} of {n_sym} DATA symbols")
    pts = pts[:n_sym]
    weights = None if csi is None else np.tile(np.asarray(csi, dtype=np.float64), n_sym)
    soft = deinterleave(demap(pts, m, weights), m.n_bpsc)
    n_bits = SERVICE_BITS + 8 * length + TAIL_BITS
    bits = viterbi_decode(soft, m.code_rate, n_bits)
    try:
        plain, seed = descramble(bits[:SERVICE_BITS + 8 * length])
    except ValueError as exc:
        raise FrameError("scrambler", str(exc)) from None
    return bits_to_bytes(plain[SERVICE_BITS:]), seed


def make_event(psdu: bytes, m: Mcs, start: int, cfo: float, seed: int = 0) -> FrameEvent:
    present = len(psdu) >= FCS_BYTES
    ok = check_fcs(psdu) if present else True
    return FrameEvent(bytes(psdu), m, ok, float(cfo), int(start), seed, present)
