"""Gray-mapped constellations and soft demapping.

Soft metrics are signed confidences: positive favours bit 0, negative
favours bit 1, zero carries no information. Mapping follows the 802.11
tables, so BPSK sends bit 1 as +1 and bit 0 as -1.
"""

from __future__ import annotations

import numpy as np

from .params import BITS_PER_SYMBOL

NORMALISATION = {"BPSK": 1.0, "QPSK": np.sqrt(2.0), "QAM16": np.sqrt(10.0), "QAM64": np.sqrt(42.0)}

# per-axis Gray levels indexed by the bit group read MSB first (b0 b1 ...)
_LEVELS = {
    1: np.array([-1.0, 1.0]),
    2: np.array([-3.0, -1.0, 3.0, 1.0]),
    3: np.array([-7.0, -5.0, -1.0, -3.0, 7.0, 5.0, 1.0, 3.0]),
}


def _modulation(m) -> str:
    name = getattr(m, "modulation", m)
    name = str(name).upper()
    if name not in BITS_PER_SYMBOL:
        raise ValueError(f"unknown modulation {m!r}")
    return name


def _axis_values(bits: np.ndarray) -> np.ndarray:
    width = bits.shape[-1]
    idx = np.zeros(bits.shape[:-1], dtype=np.int64)
    for i in range(width):
        idx = (idx << 1) | bits[..., i]
    return _LEVELS[width][idx]


def map_bits(bits, modulation) -> np.ndarray:
    """Map coded bits to unit-average-energy complex points."""
    name = _modulation(modulation)
    n_bpsc = BITS_PER_SYMBOL[name]
    b = np.asarray(bits, dtype=np.int64)
    if b.size % n_bpsc:
        raise ValueError(f"bit count {b.size} is not a multiple of {n_bpsc}")
    groups = b.reshape(-1, n_bpsc)
    if name == "BPSK":
        pts = _axis_values(groups).astype(np.complex128)
    else:
        half = n_bpsc // 2
        pts = _axis_values(groups[:, :half]) + 1j * _axis_values(groups[:, half:])
    return pts / NORMALISATION[name]


def _axis_soft(y: np.ndarray, width: int) -> list:
    soft = [-y]
    if width >= 2:
        soft.append(np.abs(y) - (2.0 if width == 2 else 4.0))
    if width == 3:
        soft.append(np.abs(np.abs(y) - 4.0) - 2.0)
    return soft


def demap(points, modulation, weights=None) -> np.ndarray:
    """Piecewise-linear max-log soft metrics for each coded bit.

    Parameters
    ----------
    points : array_like of complex
        Equalized constellation points, unit average energy.
    modulation : str or Mcs
    weights : array_like, optional
        Per-point reliability (for example ``|H|^2``), broadcast against
        ``points`` and applied to every bit of a point.

    Returns
    -------
    numpy.ndarray
        ``len(points) * n_bpsc`` float64 metrics in transmission order.
    """
    name = _modulation(modulation)
    y = np.asarray(points, dtype=np.complex128).ravel() * NORMALISATION[name]
    if name == "BPSK":
        cols = [-y.real]
    else:
        width = BITS_PER_SYMBOL[name] // 2
        cols = _axis_soft(y.real, width) + _axis_soft(y.imag, width)
    soft = np.stack(cols, axis=-1)
    if weights is not None:
        w = np.broadcast_to(np.asarray(weights, dtype=np.float64).ravel(), y.shape)
        soft = soft * w[:, None]
    return soft.ravel()


def hard_decision(soft) -> np.ndarray:
    return (np.asarray(soft) < 0).astype(np.uint8)
