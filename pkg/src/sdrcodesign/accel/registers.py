"""Memory-mapped register file of the FFT accelerator.

=======  ===========  =====  ======  ==============================================
Address  Register     Width  Reset   Fields
=======  ===========  =====  ======  ==============================================
0x00     ID           32     ID word read-only constant ``0x46465431`` ("FFT1")
0x04     CTRL         1      0       bit 0 DIRECTION (0 forward, 1 inverse)
0x08     NFFT_LOG2    4      0       transform size exponent, 3..11 (0 = unset)
0x0C     CP_LEN       11     0       cyclic prefix samples, < 2**NFFT_LOG2
0x10     SCALE_SCHED  22     0       2-bit right shift per stage, stage 0 in bits 1:0
0x14     STATUS       4      0       BUSY, DONE, ERROR, OVERFLOW; write 1 to clear
=======  ===========  =====  ======  ==============================================
"""

from __future__ import annotations

import threading
from dataclasses import dataclass

DEVICE_ID = 0x46465431

ID = 0x00
CTRL = 0x04
NFFT_LOG2 = 0x08
CP_LEN = 0x0C
SCALE_SCHED = 0x10
STATUS = 0x14

STATUS_BUSY = 0x1
STATUS_DONE = 0x2
STATUS_ERROR = 0x4
STATUS_OVERFLOW = 0x8

MIN_LOG2 = 3
MAX_LOG2 = 11


@dataclass(frozen=True)
class RegisterSpec:
    address: int
    name: str
    width: int
    reset: int
    access: str
    description: str


REGISTER_MAP = (
    RegisterSpec(ID, "ID", 32, DEVICE_ID, "ro", "device identifier"),
    RegisterSpec(CTRL, "CTRL", 1, 0, "rw", "bit 0: direction, 0 forward, 1 inverse"),
    RegisterSpec(NFFT_LOG2, "NFFT_LOG2", 4, 0, "rw", "log2 of the transform size, 3..11"),
    RegisterSpec(CP_LEN, "CP_LEN", 11, 0, "rw", "cyclic prefix length, below the size"),
    RegisterSpec(SCALE_SCHED, "SCALE_SCHED", 22, 0, "rw", "per-stage right shift, 2 bits each"),
    RegisterSpec(STATUS, "STATUS", 4, 0, "w1c", "busy, done, error, overflow"),
)
_BY_ADDR = {r.address: r for r in REGISTER_MAP}


class RegisterError(Exception):
    pass


class UnknownRegisterError(RegisterError):
    pass


class ReadOnlyRegisterError(RegisterError):
    pass


class DeviceBusyError(RegisterError):
    pass


class RangeError(RegisterError):
    pass


class RegisterFile:
    """Register storage with field checks and the busy protocol.

    A rejected write leaves the previous value in place. Range violations
    also raise STATUS.ERROR, which stays set until software clears it.
    """

    def __init__(self):
        self._lock = threading.Lock()
        self._values = {r.address: r.reset for r in REGISTER_MAP}

    @staticmethod
    def spec(addr: int) -> RegisterSpec:
        try:
            return _BY_ADDR[addr]
        except KeyError:
            raise UnknownRegisterError(f"no register at 0x{addr:02X}") from None

    def read(self, addr: int) -> int:
        self.spec(addr)
        with self._lock:
            return self._values[addr]

    def _range_fail(self, msg: str):
        self._values[STATUS] |= STATUS_ERROR
        raise RangeError(msg)

    def write(self, addr: int, value: int) -> None:
        spec = self.spec(addr)
        value = int(value)
        with self._lock:
            if spec.access == "ro":
                raise ReadOnlyRegisterError(f"{spec.name} is read-only")
            if spec.access == "w1c":
                self._values[STATUS] &= ~(value & (STATUS_DONE | STATUS_ERROR | STATUS_OVERFLOW))
                return
            if self._values[STATUS] & STATUS_BUSY:
                raise DeviceBusyError(f"write to {spec.name} while busy")
            if value < 0 or value >> spec.width:
                self._range_fail(f"{spec.name} value {value} exceeds {spec.width} bits")
            if addr == NFFT_LOG2:
                if not MIN_LOG2 <= value <= MAX_LOG2:
                    self._range_fail(f"NFFT_LOG2 {value} outside {MIN_LOG2}..{MAX_LOG2}")
                if self._values[CP_LEN] >= 1 << value:
                    self._range_fail("current CP_LEN does not fit the new size")
            if addr == CP_LEN and self._values[NFFT_LOG2] and value >= 1 << self._values[NFFT_LOG2]:
                self._range_fail(f"CP_LEN {value} not below the transform size")
            self._values[addr] = value

    def set_status(self, set_bits: int = 0, clear_bits: int = 0) -> None:
        """Device-side status update (not reachable through :meth:`write`)."""
        with self._lock:
            self._values[STATUS] = (self._values[STATUS] & ~clear_bits) | set_bits

    def reset(self) -> None:
        with self._lock:
            self._values = {r.address: r.reset for r in REGISTER_MAP}
