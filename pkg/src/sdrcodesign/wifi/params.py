"""802.11p OFDM numerology, rate table and training sequences.

The PHY is the 802.11a OFDM PHY clocked at 10 MHz: 64-point FFT, 16-sample
cyclic prefix, 48 data and 4 pilot subcarriers, 3 to 27 Mb/s.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

PILOT_CARRIERS = (-21, -7, 7, 21)
PILOT_VALUES = (1.0, 1.0, 1.0, -1.0)
DATA_CARRIERS = tuple(k for k in range(-26, 27) if k != 0 and k not in PILOT_CARRIERS)

# Frequency-domain training symbols over carriers -26..26
_STF_26 = np.sqrt(13.0 / 6.0) * np.array([
    0, 0, 1 + 1j, 0, 0, 0, -1 - 1j, 0, 0, 0, 1 + 1j, 0, 0, 0, -1 - 1j, 0, 0, 0,
    -1 - 1j, 0, 0, 0, 1 + 1j, 0, 0, 0, 0, 0, 0, 0, -1 - 1j, 0, 0, 0, -1 - 1j, 0, 0, 0,
    1 + 1j, 0, 0, 0, 1 + 1j, 0, 0, 0, 1 + 1j, 0, 0, 0, 1 + 1j, 0, 0,
])
_LTF_26 = np.array([
    1, 1, -1, -1, 1, 1, -1, 1, -1, 1, 1, 1, 1, 1, 1, -1, -1, 1, 1, -1, 1, -1, 1, 1, 1, 1,
    0, 1, -1, -1, 1, 1, -1, 1, -1, 1, -1, -1, -1, -1, -1, 1, 1, -1, -1, 1, -1, 1, -1, 1,
    1, 1, 1,
], dtype=np.complex128)


def _to_bins(values_26: np.ndarray, n: int = 64) -> np.ndarray:
    out = np.zeros(n, dtype=np.complex128)
    for i, k in enumerate(range(-26, 27)):
        out[k % n] = values_26[i]
    out.flags.writeable = False
    return out


STF_FREQ = _to_bins(_STF_26)
LTF_FREQ = _to_bins(_LTF_26)


@dataclass(frozen=True)
class Mcs:
    """One of the eight OFDM rates; build with :func:`mcs` or :data:`MCS_TABLE`."""

    name: str
    modulation: str
    code_rate: Fraction
    n_bpsc: int
    rate_bits: tuple
    mbps_20: float

    @property
    def n_cbps(self) -> int:
        return 48 * self.n_bpsc

    @property
    def n_dbps(self) -> int:
        return int(self.n_cbps * self.code_rate)

    def mbps(self, sample_rate: float = 10e6) -> float:
        return self.mbps_20 * sample_rate / 20e6

    def __str__(self):
        return self.name


_RATES = [
    ("BPSK-1/2", "BPSK", Fraction(1, 2), 1, (1, 1, 0, 1), 6.0),
    ("BPSK-3/4", "BPSK", Fraction(3, 4), 1, (1, 1, 1, 1), 9.0),
    ("QPSK-1/2", "QPSK", Fraction(1, 2), 2, (0, 1, 0, 1), 12.0),
    ("QPSK-3/4", "QPSK", Fraction(3, 4), 2, (0, 1, 1, 1), 18.0),
    ("QAM16-1/2", "QAM16", Fraction(1, 2), 4, (1, 0, 0, 1), 24.0),
    ("QAM16-3/4", "QAM16", Fraction(3, 4), 4, (1, 0, 1, 1), 36.0),
    ("QAM64-2/3", "QAM64", Fraction(2, 3), 6, (0, 0, 0, 1), 48.0),
    ("QAM64-3/4", "QAM64", Fraction(3, 4), 6, (0, 0, 1, 1), 54.0),
]

MCS_TABLE = tuple(Mcs(*r) for r in _RATES)
MODULATIONS = ("BPSK", "QPSK", "QAM16", "QAM64")
BITS_PER_SYMBOL = {"BPSK": 1, "QPSK": 2, "QAM16": 4, "QAM64": 6}


def mcs(name) -> Mcs:
    """Look up a rate by name (``"QPSK-3/4"``, ``"qpsk_3_4"``) or 10 MHz Mb/s value."""
    if isinstance(name, Mcs):
        return name
    key = str(name).strip().upper().replace("_", "-").replace(" ", "")
    for m in MCS_TABLE:
        if key in (m.name, m.name.replace("/", "-"), m.name.replace("-", "").replace("/", "")):
            return m
    try:
        value = float(key)
    except ValueError:
        value = None
    if value is not None:
        for m in MCS_TABLE:
            if m.mbps(10e6) == value:
                return m
    raise ValueError(f"unknown MCS {name!r}")


def mcs_from_rate_bits(bits) -> Mcs | None:
    bits = tuple(int(b) for b in bits)
    for m in MCS_TABLE:
        if m.rate_bits == bits:
            return m
    return None


@dataclass(frozen=True)
class OfdmParams:
    sample_rate: float = 10e6
    fft_size: int = 64
    cp_len: int = 16
    data_carriers: tuple = DATA_CARRIERS
    pilot_carriers: tuple = PILOT_CARRIERS
    stf_len: int = 160
    ltf_len: int = 160
    null_carriers: tuple = field(init=False)

    def __post_init__(self):
        if self.cp_len >= self.fft_size:
            raise ValueError("cp_len must be smaller than fft_size")
        half = self.fft_size // 2
        used = set(self.data_carriers) | set(self.pilot_carriers)
        if len(used) != len(self.data_carriers) + len(self.pilot_carriers):
            raise ValueError("data and pilot carriers overlap")
        if any(not -half <= k < half for k in used) or 0 in used:
            raise ValueError("carrier index out of range or on DC")
        nulls = tuple(k for k in range(-half, half) if k not in used)
        object.__setattr__(self, "null_carriers", nulls)

    @property
    def symbol_len(self) -> int:
        return self.fft_size + self.cp_len

    @property
    def subcarrier_spacing(self) -> float:
        return self.sample_rate / self.fft_size

    @property
    def preamble_len(self) -> int:
        return self.stf_len + self.ltf_len

    def bins(self, carriers) -> np.ndarray:
        return np.asarray(carriers, dtype=np.int64) % self.fft_size

    @property
    def data_bins(self) -> np.ndarray:
        return self.bins(self.data_carriers)

    @property
    def pilot_bins(self) -> np.ndarray:
        return self.bins(self.pilot_carriers)

    @property
    def occupied_carriers(self) -> tuple:
        return tuple(sorted(self.data_carriers + self.pilot_carriers))


DEFAULT_PARAMS = OfdmParams()

# Time-domain scaling giving unit mean power on 52 occupied carriers
TIME_SCALE = 64.0 / np.sqrt(52.0)


def _stf_time() -> np.ndarray:
    period = np.fft.ifft(STF_FREQ) * TIME_SCALE
    return np.tile(period, 3)[:160]


def _ltf_time_period() -> np.ndarray:
    return np.fft.ifft(LTF_FREQ) * TIME_SCALE


LTF_TIME = _ltf_time_period()
STF_TIME = _stf_time()


def ltf_time() -> np.ndarray:
    """Full 160-sample LTF: 32-sample guard then two 64-sample periods."""
    return np.concatenate([LTF_TIME[32:], LTF_TIME, LTF_TIME])
