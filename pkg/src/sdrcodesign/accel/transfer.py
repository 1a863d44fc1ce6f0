"""DMA transfer-time model of the high-performance bus port."""

from __future__ import annotations

import math
from dataclasses import dataclass

BYTES_PER_SAMPLE = 4  # 16-bit I + 16-bit Q


@dataclass(frozen=True)
class TransferModel:
    """Peak-rate bus model: 64-bit words at 150 MHz give 1.2 GB/s.

    ``setup_s`` is a fixed per-job latency (descriptor setup, interrupt
    turnaround). The datapath is modeled as ``N log2 N`` clock cycles per
    transform on the same clock.
    """

    bus_bits: int = 64
    clock_hz: float = 150e6
    setup_s: float = 0.0

    def __post_init__(self):
        if self.bus_bits <= 0 or self.bus_bits % 8 or self.clock_hz <= 0 or self.setup_s < 0:
            raise ValueError("invalid transfer model parameters")

    @property
    def peak_bytes_per_s(self) -> float:
        return self.bus_bits // 8 * self.clock_hz

    def transfer_time(self, n_bytes: float) -> float:
        if n_bytes < 0:
            raise ValueError("byte count must be non-negative")
        return self.setup_s + n_bytes / self.peak_bytes_per_s

    def pipeline_time(self, fft_size: int, vectors: int = 1) -> float:
        return vectors * fft_size * math.log2(fft_size) / self.clock_hz

    def job_time(self, bytes_in: int, bytes_out: int, fft_size: int, vectors: int = 1) -> float:
        """Setup, both DMA directions and the transform pipeline."""
        return self.transfer_time(bytes_in + bytes_out) + self.pipeline_time(fft_size, vectors)


def estimate_transfer_time(model: TransferModel, n_bytes: float) -> float:
    return model.transfer_time(n_bytes)
