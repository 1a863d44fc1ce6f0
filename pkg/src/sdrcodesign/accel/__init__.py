"""Behavioral model of a memory-mapped FFT accelerator and its FFT backend adapter."""

from .backend import DeviceFftBackend, as_backend
from .device import (
    FORWARD,
    INVERSE,
    Completion,
    DeviceBusyError,
    DeviceError,
    FftConfig,
    FftDevice,
    JobSizeError,
    NotConfiguredError,
)
from .fixed import default_schedule, dequantize, fixed_fft, pack_schedule, quantize, unpack_schedule
from .registers import (
    DEVICE_ID,
    REGISTER_MAP,
    RangeError,
    ReadOnlyRegisterError,
    RegisterError,
    RegisterFile,
    UnknownRegisterError,
)
from .transfer import BYTES_PER_SAMPLE, TransferModel, estimate_transfer_time

__all__ = [
    "BYTES_PER_SAMPLE", "DEVICE_ID", "FORWARD", "INVERSE", "REGISTER_MAP", "Completion",
    "DeviceBusyError", "DeviceError", "DeviceFftBackend", "FftConfig", "FftDevice",
    "JobSizeError", "NotConfiguredError", "RangeError", "ReadOnlyRegisterError", "RegisterError",
    "RegisterFile", "TransferModel", "UnknownRegisterError", "as_backend", "default_schedule",
    "dequantize", "estimate_transfer_time", "fixed_fft", "pack_schedule", "quantize",
    "unpack_schedule",
]
