"""Scrambler, convolutional code, puncturing, interleaving and FCS."""

from __future__ import annotations

import zlib
from fractions import Fraction

import numpy as np

from .. import kernels
from .params import BITS_PER_SYMBOL

# ---------------------------------------------------------------- scrambler


def scrambler_sequence(seed: int, n: int) -> np.ndarray:
    """First ``n`` output bits of the x^7 + x^4 + 1 scrambler from 7-bit ``seed``."""
    state = int(seed) & 0x7F
    out = np.empty(n, dtype=np.uint8)
    for i in range(n):
        fb = ((state >> 6) ^ (state >> 3)) & 1
        state = ((state << 1) | fb) & 0x7F
        out[i] = fb
    return out


_PERIOD = {s: scrambler_sequence(s, 127) for s in range(1, 128)}
# the first seven output bits identify the seed uniquely
_SEED_BY_PREFIX = {tuple(seq[:7]): s for s, seq in _PERIOD.items()}


def _keystream(seed: int, n: int) -> np.ndarray:
    seq = _PERIOD[seed]
    reps = -(-n // 127)
    return np.tile(seq, reps)[:n]


def scramble(bits, seed: int) -> np.ndarray:
    seed = int(seed) & 0x7F
    if seed == 0:
        raise ValueError("scrambler seed must be nonzero")
    bits = np.asarray(bits, dtype=np.uint8)
    return bits ^ _keystream(seed, len(bits))


def recover_seed(scrambled_bits) -> int:
    """Seed whose sequence starts with the first seven bits (SERVICE bits are zero)."""
    prefix = tuple(int(b) for b in np.asarray(scrambled_bits[:7], dtype=np.uint8))
    try:
        return _SEED_BY_PREFIX[prefix]
    except KeyError:
        raise ValueError("all-zero scrambler prefix: no valid seed") from None


def descramble(bits) -> tuple[np.ndarray, int]:
    """Descramble a DATA field whose first seven plain bits are zero.

    Returns ``(plain_bits, seed)``.
    """
    bits = np.asarray(bits, dtype=np.uint8)
    seed = recover_seed(bits)
    return bits ^ _keystream(seed, len(bits)), seed


PILOT_POLARITY = 1.0 - 2.0 * scrambler_sequence(0x7F, 127).astype(np.float64)

# ----------------------------------------------------------- convolutional

G0 = 0o133
G1 = 0o171
_TAPS_A = [d for d in range(7) if (G0 >> (6 - d)) & 1]
_TAPS_B = [d for d in range(7) if (G1 >> (6 - d)) & 1]


def conv_encode(bits) -> np.ndarray:
    """Rate-1/2 K=7 encoder from the zero state; output interleaves A, B."""
    b = np.asarray(bits, dtype=np.uint8)
    n = len(b)
    padded = np.concatenate([np.zeros(6, np.uint8), b])
    a = np.zeros(n, np.uint8)
    c = np.zeros(n, np.uint8)
    for d in _TAPS_A:
        a ^= padded[6 - d:6 - d + n]
    for d in _TAPS_B:
        c ^= padded[6 - d:6 - d + n]
    out = np.empty(2 * n, np.uint8)
    out[0::2] = a
    out[1::2] = c
    return out


PUNCTURE_PATTERNS = {
    Fraction(1, 2): np.array([1, 1], dtype=bool),
    Fraction(2, 3): np.array([1, 1, 1, 0], dtype=bool),
    Fraction(3, 4): np.array([1, 1, 1, 0, 0, 1], dtype=bool),
}


def _pattern(rate) -> np.ndarray:
    try:
        return PUNCTURE_PATTERNS[Fraction(rate)]
    except KeyError:
        raise ValueError(f"unsupported code rate {rate}") from None


def puncture(coded, rate) -> np.ndarray:
    coded = np.asarray(coded)
    pat = _pattern(rate)
    if len(coded) % len(pat):
        raise ValueError("mother-code length is not a whole number of puncturing periods")
    mask = np.tile(pat, len(coded) // len(pat))
    return coded[mask]


def depuncture(values, rate, fill=0.0) -> np.ndarray:
    """Reinsert punctured positions as ``fill`` (an erasure for soft metrics)."""
    values = np.asarray(values, dtype=np.float64)
    pat = _pattern(rate)
    kept = int(pat.sum())
    if len(values) % kept:
        raise ValueError("punctured length is not a whole number of periods")
    periods = len(values) // kept
    out = np.full(periods * len(pat), fill, dtype=np.float64)
    out[np.tile(pat, periods)] = values
    return out


def viterbi_decode(soft_bits, code_rate, length: int, terminated: bool = True) -> np.ndarray:
    """ML-decode ``length`` information bits from punctured soft metrics.

    Soft metrics follow the receiver convention: positive favours 0, zero is
    an erasure. With ``terminated`` the trellis is closed in state 0 after
    ``length`` bits (the six tail bits must be included in ``length``).
    """
    mother = depuncture(soft_bits, code_rate)
    if len(mother) < 2 * length:
        raise ValueError(f"{len(soft_bits)} soft bits cannot carry {length} bits at rate {code_rate}")
    return kernels.viterbi_soft(mother[: 2 * length], int(length), bool(terminated))


# --------------------------------------------------------------- interleaver

_PERM_CACHE: dict = {}


def interleaver_permutation(n_bpsc: int) -> np.ndarray:
    """``j[k]``: position after interleaving of coded bit ``k`` within a symbol."""
    p = _PERM_CACHE.get(n_bpsc)
    if p is None:
        n_cbps = 48 * n_bpsc
        s = max(n_bpsc // 2, 1)
        k = np.arange(n_cbps)
        i = (n_cbps // 16) * (k % 16) + k // 16
        j = s * (i // s) + (i + n_cbps - (16 * i) // n_cbps) % s
        p = _PERM_CACHE[n_bpsc] = j
    return p


def _n_bpsc(modulation) -> int:
    if isinstance(modulation, (int, np.integer)):
        return int(modulation)
    try:
        return BITS_PER_SYMBOL[str(modulation).upper()]
    except KeyError:
        raise ValueError(f"unknown modulation {modulation!r}") from None


def interleave(bits, modulation) -> np.ndarray:
    """Interleave one or more whole OFDM symbols of coded bits."""
    n_bpsc = _n_bpsc(modulation)
    n_cbps = 48 * n_bpsc
    x = np.asarray(bits)
    if x.size % n_cbps or x.size == 0:
        raise ValueError(f"length {x.size} is not a multiple of {n_cbps} coded bits")
    j = interleaver_permutation(n_bpsc)
    rows = x.reshape(-1, n_cbps)
    out = np.empty_like(rows)
    out[:, j] = rows
    return out.reshape(x.shape)


def deinterleave(bits, modulation) -> np.ndarray:
    n_bpsc = _n_bpsc(modulation)
    n_cbps = 48 * n_bpsc
    x = np.asarray(bits)
    if x.size % n_cbps or x.size == 0:
        raise ValueError(f"length {x.size} is not a multiple of {n_cbps} coded bits")
    j = interleaver_permutation(n_bpsc)
    rows = x.reshape(-1, n_cbps)
    return rows[:, j].reshape(x.shape)


# ----------------------------------------------------------------- bits/FCS


def bytes_to_bits(data: bytes) -> np.ndarray:
    """LSB-first bit expansion, as transmitted."""
    arr = np.frombuffer(bytes(data), dtype=np.uint8)
    return np.unpackbits(arr, bitorder="little")


def bits_to_bytes(bits) -> bytes:
    return np.packbits(np.asarray(bits, dtype=np.uint8), bitorder="little").tobytes()


def crc32(data: bytes) -> int:
    return zlib.crc32(bytes(data)) & 0xFFFFFFFF


def append_fcs(payload: bytes) -> bytes:
    return bytes(payload) + crc32(payload).to_bytes(4, "little")


def check_fcs(psdu: bytes) -> bool:
    psdu = bytes(psdu)
    if len(psdu) < 4:
        raise ValueError("PSDU shorter than the 4-byte FCS")
    return crc32(psdu[:-4]) == int.from_bytes(psdu[-4:], "little")
