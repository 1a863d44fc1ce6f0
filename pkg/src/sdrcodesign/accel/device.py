"""Behavioral FFT accelerator: registers, DMA jobs and the fixed-point core."""

from __future__ import annotations

import threading
from dataclasses import dataclass

import numpy as np

from . import registers as R
from .fixed import default_schedule, fixed_fft, pack_schedule, unpack_schedule
from .transfer import BYTES_PER_SAMPLE, TransferModel

FORWARD = 0
INVERSE = 1


class DeviceError(Exception):
    pass


class DeviceBusyError(DeviceError, R.DeviceBusyError):
    pass


class NotConfiguredError(DeviceError):
    pass


class JobSizeError(DeviceError, ValueError):
    pass


@dataclass(frozen=True)
class FftConfig:
    direction: int = FORWARD
    fft_size: int = 64
    cp_len: int = 0
    scale_sched: tuple | None = None

    @property
    def log2n(self) -> int:
        return self.fft_size.bit_length() - 1

    @property
    def schedule(self) -> tuple:
        return default_schedule(self.log2n) if self.scale_sched is None else tuple(self.scale_sched)

    @property
    def input_len(self) -> int:
        return self.fft_size + (self.cp_len if self.direction == FORWARD else 0)

    @property
    def output_len(self) -> int:
        return self.fft_size + (self.cp_len if self.direction == INVERSE else 0)


@dataclass(frozen=True)
class Completion:
    """Result of one DMA job; ``output`` has shape (vectors, output_len, 2) or (output_len, 2)."""

    output: np.ndarray
    overflow: bool
    bytes_in: int
    bytes_out: int
    modeled_time: float


class FftDevice:
    """One accelerator instance; jobs run one at a time.

    ``start`` latches a job and raises BUSY; ``wait`` returns its
    :class:`Completion` and raises DONE. The datapath result is computed
    when the job starts, but it only becomes visible through ``wait``.
    Forward jobs strip ``CP_LEN`` leading samples from each input vector;
    inverse jobs prepend a cyclic prefix of that length to each output.
    """

    def __init__(self, model: TransferModel | None = None, max_log2: int = R.MAX_LOG2):
        self.model = model or TransferModel()
        self.max_log2 = max_log2
        self.regs = R.RegisterFile()
        self._job = None
        self._lock = threading.Lock()
        self.jobs = 0
        self.config_epoch = 0

    # -- register access
    def write_register(self, addr: int, value: int) -> None:
        if addr == R.NFFT_LOG2 and R.MIN_LOG2 <= int(value) and int(value) > self.max_log2:
            self.regs.set_status(R.STATUS_ERROR)
            raise R.RangeError(f"NFFT_LOG2 {value} beyond device capability {self.max_log2}")
        self.regs.write(addr, value)
        self.config_epoch += 1

    def read_register(self, addr: int) -> int:
        return self.regs.read(addr)

    @property
    def status(self) -> int:
        return self.regs.read(R.STATUS)

    @property
    def busy(self) -> bool:
        return bool(self.status & R.STATUS_BUSY)

    def supports(self, fft_size: int) -> bool:
        n = int(fft_size)
        return n >= 1 << R.MIN_LOG2 and n <= 1 << self.max_log2 and n & (n - 1) == 0

    @property
    def capabilities(self) -> dict:
        return {"sizes": [1 << k for k in range(R.MIN_LOG2, self.max_log2 + 1)],
                "directions": ("forward", "inverse"), "sample_format": "Q1.15"}

    # -- configuration
    def config(self) -> FftConfig:
        log2n = self.regs.read(R.NFFT_LOG2)
        if not log2n:
            raise NotConfiguredError("NFFT_LOG2 has not been written")
        return FftConfig(
            self.regs.read(R.CTRL) & 1, 1 << log2n, self.regs.read(R.CP_LEN),
            unpack_schedule(self.regs.read(R.SCALE_SCHED), log2n),
        )

    def configure(self, plan: FftConfig | None = None, **kwargs) -> FftConfig:
        """Write a whole configuration; equivalent to the individual register writes."""
        plan = plan or FftConfig(**kwargs)
        if self.busy:
            raise DeviceBusyError("configure while busy")
        if not self.supports(plan.fft_size):
            raise JobSizeError(f"unsupported FFT size {plan.fft_size}")
        if not 0 <= plan.cp_len < plan.fft_size:
            raise JobSizeError(f"cp_len {plan.cp_len} must be below {plan.fft_size}")
        if plan.direction not in (FORWARD, INVERSE):
            raise JobSizeError("direction must be 0 (forward) or 1 (inverse)")
        sched = pack_schedule(plan.schedule)
        if len(plan.schedule) != plan.log2n:
            raise JobSizeError(f"schedule needs {plan.log2n} stages")
        # order the size and prefix writes so every intermediate state is legal
        self.write_register(R.CP_LEN, 0)
        self.write_register(R.NFFT_LOG2, plan.log2n)
        self.write_register(R.CP_LEN, plan.cp_len)
        self.write_register(R.CTRL, plan.direction)
        self.write_register(R.SCALE_SCHED, sched)
        return self.config()

    # -- jobs
    def start(self, buffer) -> None:
        with self._lock:
            if self.busy:
                raise DeviceBusyError("job submitted while busy")
            cfg = self.config()
            q = np.asarray(buffer)
            if q.ndim not in (2, 3) or q.shape[-1] != 2:
                raise JobSizeError("buffer must have shape (length, 2) or (vectors, length, 2)")
            if q.shape[-2] != cfg.input_len:
                raise JobSizeError(f"expected {cfg.input_len} samples per vector, got {q.shape[-2]}")
            if q.dtype != np.int16:
                if not np.issubdtype(q.dtype, np.integer) or q.min(initial=0) < -32768 or q.max(initial=0) > 32767:
                    raise JobSizeError("samples must be 16-bit two's complement")
                q = q.astype(np.int16)
            self.regs.set_status(R.STATUS_BUSY, R.STATUS_DONE | R.STATUS_OVERFLOW)
            body = q[..., cfg.cp_len:, :] if cfg.direction == FORWARD else q
            out, overflow = fixed_fft(body, cfg.direction == INVERSE, cfg.schedule)
            if cfg.direction == INVERSE and cfg.cp_len:
                out = np.concatenate([out[..., -cfg.cp_len:, :], out], axis=-2)
            vectors = 1 if q.ndim == 2 else q.shape[0]
            b_in = vectors * cfg.input_len * BYTES_PER_SAMPLE
            b_out = vectors * cfg.output_len * BYTES_PER_SAMPLE
            t = self.model.job_time(b_in, b_out, cfg.fft_size, vectors)
            self._job = Completion(out, overflow, b_in, b_out, t)

    def wait(self) -> Completion:
        with self._lock:
            job, self._job = self._job, None
            if job is None:
                raise DeviceError("no job in flight")
            bits = R.STATUS_DONE | (R.STATUS_OVERFLOW if job.overflow else 0)
            self.regs.set_status(bits, R.STATUS_BUSY)
            self.jobs += 1
            return job

    def submit(self, buffer) -> Completion:
        self.start(buffer)
        return self.wait()
