"""Packet error rate: capture synthesis, matching and SNR sweeps."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

import numpy as np

from .channel import apply_channel
from .coding import append_fcs
from .frame import FCS_BYTES
from .params import DEFAULT_PARAMS, OfdmParams, mcs
from .rx import receive
from .tx import encode_frame

DEFAULT_GAP = 400


@dataclass(frozen=True)
class PerResult:
    per: float
    sent: int
    detected: int
    passed: int


def compute_per(sent, events) -> PerResult:
    """``1 - matched / len(sent)``; each event can vouch for one sent frame.

    Only events with a good FCS count, and their PSDU must equal a sent
    PSDU byte for byte.
    """
    sent = [bytes(s) for s in sent]
    if not sent:
        raise ValueError("no frames were sent")
    remaining = Counter(sent)
    passed = 0
    for ev in events:
        if ev.fcs_ok and remaining[ev.psdu] > 0:
            remaining[ev.psdu] -= 1
            passed += 1
    return PerResult(1.0 - passed / len(sent), len(sent), len(events), passed)


def random_psdus(count: int, length: int, seed: int = 0) -> list:
    """Random PSDUs ending in a valid FCS (plain random bytes below 4 bytes)."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        if length >= FCS_BYTES:
            out.append(append_fcs(rng.bytes(length - FCS_BYTES)))
        else:
            out.append(rng.bytes(length))
    return out


def build_capture(psdus, m, gap: int = DEFAULT_GAP, params: OfdmParams = DEFAULT_PARAMS,
                  seed: int = 0) -> tuple[np.ndarray, list]:
    """Concatenate encoded frames separated by ``gap`` zero samples.

    Scrambler seeds cycle through 1..127 starting from ``seed``. Returns the
    samples and each frame's first sample index.
    """
    parts = [np.zeros(gap, np.complex64)]
    starts = []
    pos = gap
    for i, p in enumerate(psdus):
        frame = encode_frame(p, mcs(m), params, scrambler_seed=(seed + i) % 127 + 1)
        starts.append(pos)
        parts.append(frame)
        parts.append(np.zeros(gap, np.complex64))
        pos += len(frame) + gap
    return np.concatenate(parts), starts


def measure_per(m, snr_db: float, n_frames: int = 100, length: int = 100, seed: int = 0,
                cfo: float = 0.0, taps=(1.0,), params: OfdmParams = DEFAULT_PARAMS,
                backend=None, gap: int = DEFAULT_GAP) -> PerResult:
    """Encode ``n_frames`` random PSDUs, impair the capture, receive and score it."""
    psdus = random_psdus(n_frames, length, seed)
    samples, _ = build_capture(psdus, m, gap, params, seed)
    rx_in = apply_channel(samples, cfo=cfo, snr_db=snr_db, taps=taps, seed=seed + 1,
                          sample_rate=params.sample_rate)
    return compute_per(psdus, receive(rx_in, params, backend=backend))


def per_sweep(m, snrs, n_frames: int = 100, length: int = 100, seed: int = 0, **kwargs) -> dict:
    """PER at each SNR with the same PSDUs and noise seed per point."""
    return {float(s): measure_per(m, s, n_frames, length, seed, **kwargs) for s in snrs}
