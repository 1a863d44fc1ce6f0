"""SIGNAL field, frame sizing and receiver output records."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .params import DEFAULT_PARAMS, Mcs, OfdmParams, mcs_from_rate_bits

MAX_PSDU = 4095
SERVICE_BITS = 16
TAIL_BITS = 6
FCS_BYTES = 4


class FrameError(ValueError):
    """A frame could not be decoded; ``reason`` is a short machine-readable tag."""

    def __init__(self, reason: str, detail: str = ""):
        super().__init__(f"{reason}: {detail}" if detail else reason)
        self.reason = reason


class SignalError(FrameError):
    pass


@dataclass(frozen=True)
class SignalField:
    rate_bits: tuple
    length: int
    parity: int
    tail: tuple = (0,) * 6

    @property
    def mcs(self) -> Mcs | None:
        return mcs_from_rate_bits(self.rate_bits)

    def bits(self) -> np.ndarray:
        b = np.zeros(24, dtype=np.uint8)
        b[0:4] = self.rate_bits
        b[5:17] = [(self.length >> i) & 1 for i in range(12)]
        b[17] = self.parity
        b[18:24] = self.tail
        return b


def signal_field(m: Mcs, length: int) -> SignalField:
    if not 1 <= length <= MAX_PSDU:
        raise ValueError(f"PSDU length {length} outside 1..{MAX_PSDU}")
    head = np.zeros(17, dtype=np.uint8)
    head[0:4] = m.rate_bits
    head[5:17] = [(length >> i) & 1 for i in range(12)]
    return SignalField(tuple(m.rate_bits), length, int(head.sum() & 1))


def parse_signal(bits) -> SignalField:
    """Validate 24 decoded SIGNAL bits; raise :class:`SignalError` on any violation."""
    b = np.asarray(bits, dtype=np.uint8)
    if b.size != 24:
        raise SignalError("signal-size", f"expected 24 bits, got {b.size}")
    rate = tuple(int(x) for x in b[0:4])
    length = int(sum(int(b[5 + i]) << i for i in range(12)))
    parity = int(b[17])
    tail = tuple(int(x) for x in b[18:24])
    if int(b[:17].sum() & 1) != parity:
        raise SignalError("parity")
    if mcs_from_rate_bits(rate) is None:
        raise SignalError("rate", f"bits {rate}")
    if any(tail):
        raise SignalError("tail")
    if length < 1:
        raise SignalError("length", "zero length")
    return SignalField(rate, length, parity, tail)


def n_data_symbols(length: int, m: Mcs) -> int:
    return math.ceil((SERVICE_BITS + 8 * length + TAIL_BITS) / m.n_dbps)


def frame_samples(length: int, m: Mcs, params: OfdmParams = DEFAULT_PARAMS) -> int:
    return params.preamble_len + params.symbol_len * (1 + n_data_symbols(length, m))


@dataclass(frozen=True)
class FrameEvent:
    """One decoded frame.

    ``fcs_present`` is false for PSDUs shorter than the 4-byte FCS; such
    frames are reported with ``fcs_ok`` true since their SIGNAL and tail
    checks passed and there is no checksum to contradict them.
    """

    psdu: bytes
    mcs: Mcs
    fcs_ok: bool
    cfo_applied: float
    start: int
    scrambler_seed: int = 0
    fcs_present: bool = True

    def to_dict(self) -> dict:
        return {
            "start": self.start,
            "mcs": self.mcs.name,
            "length": len(self.psdu),
            "fcs_ok": self.fcs_ok,
            "fcs_present": self.fcs_present,
            "cfo_hz": round(self.cfo_applied, 3),
            "scrambler_seed": self.scrambler_seed,
            "psdu": self.psdu.hex(),
        }
