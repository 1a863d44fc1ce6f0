"""Stream item kinds, tags and the single-producer single-consumer ring buffer."""

from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Any, NamedTuple

import numpy as np


@dataclass(frozen=True)
class ItemKind:
    """Type of the items flowing over one port.

    ``vlen`` > 1 marks a vector item made of ``vlen`` scalars.
    """

    name: str
    dtype: str
    vlen: int = 1

    def __post_init__(self):
        if self.vlen < 1:
            raise ValueError("vector arity must be >= 1")

    @property
    def itemsize(self) -> int:
        return np.dtype(self.dtype).itemsize * self.vlen

    @property
    def shape(self) -> tuple:
        return () if self.vlen == 1 else (self.vlen,)


COMPLEX32 = ItemKind("complex32", "complex64")
REAL32 = ItemKind("real32", "float32")
INT32 = ItemKind("int32", "int32")
BYTE = ItemKind("byte", "uint8")


def complex_vector(n: int) -> ItemKind:
    return ItemKind(f"complex32[{n}]", "complex64", n)


class Tag(NamedTuple):
    """Metadata attached to the item at absolute stream index ``offset``."""

    offset: int
    key: str
    value: Any


def next_pow2(n: int) -> int:
    n = max(int(n), 1)
    return 1 << (n - 1).bit_length()


class RingBuffer:
    """Bounded SPSC item buffer with monotonically increasing indices.

    The producer only touches slots in ``[write_index, read_index + capacity)``
    and the consumer only ``[read_index, write_index)``, so data copies run
    outside the lock; only index and tag updates are serialised.
    """

    def __init__(self, capacity: int, kind: ItemKind):
        self.capacity = next_pow2(capacity)
        self.kind = kind
        self._mask = self.capacity - 1
        self._data = np.zeros((self.capacity,) + kind.shape, dtype=kind.dtype)
        self.read_index = 0
        self.write_index = 0
        self.high_water = 0
        self._tags: list[Tag] = []
        self._lock = threading.Lock()

    @property
    def occupancy(self) -> int:
        with self._lock:
            return self.write_index - self.read_index

    @property
    def space(self) -> int:
        return self.capacity - self.occupancy

    def indices(self) -> tuple[int, int]:
        with self._lock:
            return self.read_index, self.write_index

    def peek(self, n: int) -> np.ndarray:
        """Return the next ``n`` readable items (read-only when not wrapped)."""
        start = self.read_index & self._mask
        end = start + n
        if end <= self.capacity:
            view = self._data[start:end]
            view = view.view()
            view.flags.writeable = False
            return view
        first = self.capacity - start
        return np.concatenate([self._data[start:], self._data[: n - first]])

    def tags_in(self, start: int, end: int) -> list[Tag]:
        with self._lock:
            return [t for t in self._tags if start <= t.offset < end]

    def write(self, items: np.ndarray, tags=()) -> None:
        n = len(items)
        with self._lock:
            w = self.write_index
            if n > self.capacity - (w - self.read_index):
                raise OverflowError("write exceeds free space")
        start = w & self._mask
        end = start + n
        if end <= self.capacity:
            self._data[start:end] = items
        else:
            first = self.capacity - start
            self._data[start:] = items[:first]
            self._data[: n - first] = items[first:]
        with self._lock:
            if tags:
                self._tags.extend(tags)
                self._tags.sort(key=lambda t: t.offset)
            self.write_index = w + n
            occ = self.write_index - self.read_index
            if occ > self.high_water:
                self.high_water = occ

    def consume(self, n: int) -> None:
        with self._lock:
            if n > self.write_index - self.read_index:
                raise ValueError("consume exceeds available items")
            self.read_index += n
            if self._tags and self._tags[0].offset < self.read_index:
                self._tags = [t for t in self._tags if t.offset >= self.read_index]
