"""Block base classes, work windows and per-block performance counters."""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .buffer import ItemKind, Tag


@dataclass(frozen=True)
class Port:
    kind: ItemKind
    rate: Fraction = Fraction(1)


@dataclass
class InputWindow:
    """Readable items offered to one input port for a single work call.

    ``done`` is set when upstream has finished and the window holds every
    remaining item of the stream.
    """

    items: np.ndarray
    offset: int
    tags: list
    done: bool = False

    def __len__(self):
        return len(self.items)


@dataclass
class OutputWindow:
    """Writable space for one output port; ``offset`` is the absolute index of items[0]."""

    items: np.ndarray
    offset: int
    tags: list = field(default_factory=list)

    def __len__(self):
        return len(self.items)

    def add_tag(self, index: int, key: str, value) -> None:
        self.tags.append(Tag(self.offset + index, key, value))


@dataclass(frozen=True)
class BlockCounters:
    name: str
    calls: int
    items_in: tuple
    items_out: tuple
    time_ns: int
    cycles: int
    avg_cycles: float
    modeled_ns: int


class PerfCounters:
    """Monotonic per-block counters, all zero while disabled."""

    def __init__(self, n_in: int, n_out: int, enabled: bool = True):
        self.enabled = enabled
        self.calls = 0
        self.items_in = [0] * n_in
        self.items_out = [0] * n_out
        self.time_ns = 0
        self.modeled_ns = 0
        self._lock = threading.Lock()

    def record(self, consumed, produced, elapsed_ns: int, modeled_ns: int = 0) -> None:
        if not self.enabled:
            return
        with self._lock:
            self.calls += 1
            for i, c in enumerate(consumed):
                self.items_in[i] += int(c)
            for i, p in enumerate(produced):
                self.items_out[i] += int(p)
            self.time_ns += max(int(elapsed_ns), 0)
            self.modeled_ns += int(modeled_ns)

    def snapshot(self, name: str, nominal_hz: float) -> BlockCounters:
        with self._lock:
            calls = self.calls
            items_in = tuple(self.items_in)
            items_out = tuple(self.items_out)
            t = self.time_ns
            modeled = self.modeled_ns
        cycles = int(round(t * nominal_hz / 1e9))
        avg = cycles / calls if calls else 0.0
        return BlockCounters(name, calls, items_in, items_out, t, cycles, avg, modeled)


class Block:
    """A stream processing block.

    Subclasses implement :meth:`work`, which receives one :class:`InputWindow`
    per input and one :class:`OutputWindow` per output and returns
    ``(consumed, produced)`` lists. A block must never consume more than its
    window offers nor produce more than the space it was given.

    ``min_input``/``min_output`` are the smallest windows the block can make
    progress with; the scheduler never offers less unless the stream is done.
    Sources set ``finished`` once they have nothing more to emit.
    """

    min_input = 1
    min_output = 1

    def __init__(self, name: str, inputs=(), outputs=()):
        self.name = name
        self.inputs = [p if isinstance(p, Port) else Port(p) for p in inputs]
        self.outputs = [p if isinstance(p, Port) else Port(p) for p in outputs]
        self.counters = PerfCounters(len(self.inputs), len(self.outputs))
        self.finished = False
        self._offload_modeled_ns = 0
        self._offload_excluded_ns = 0

    def __repr__(self):
        return f"<{type(self).__name__} {self.name!r}>"

    def work(self, inputs, outputs):
        raise NotImplementedError

    def report_offload(self, modeled_s: float, emulated_s: float = 0.0) -> None:
        """Cost hook for accelerator backends.

        ``modeled_s`` is the device time reported by the transfer model;
        ``emulated_s`` is host time spent simulating the device datapath,
        which is excluded from the block's measured work time.
        """
        self._offload_modeled_ns += int(round(modeled_s * 1e9))
        self._offload_excluded_ns += int(round(emulated_s * 1e9))

    def call_work(self, inputs, outputs):
        """Invoke :meth:`work`, check the window contract and update counters."""
        self._offload_modeled_ns = 0
        self._offload_excluded_ns = 0
        t0 = time.perf_counter_ns()
        result = self.work(inputs, outputs)
        elapsed = time.perf_counter_ns() - t0
        consumed, produced = result
        consumed = list(consumed)
        produced = list(produced)
        if len(consumed) != len(inputs) or len(produced) != len(outputs):
            raise ValueError(f"block {self.name!r} returned wrong port count")
        for c, win in zip(consumed, inputs):
            if c < 0 or c > len(win):
                raise ValueError(f"block {self.name!r} consumed {c} of {len(win)} items")
        for p, win in zip(produced, outputs):
            if p < 0 or p > len(win):
                raise ValueError(f"block {self.name!r} produced {p} into space {len(win)}")
        self.counters.record(
            consumed, produced, elapsed - self._offload_excluded_ns, self._offload_modeled_ns
        )
        return consumed, produced


class SyncBlock(Block):
    """One-in one-out block with a 1:1 item ratio; tags pass through unchanged."""

    def process(self, items: np.ndarray, offset: int, tags: list) -> np.ndarray:
        raise NotImplementedError

    def work(self, inputs, outputs):
        inp = inputs[0]
        out = outputs[0]
        n = min(len(inp), len(out))
        if n == 0:
            return [0], [0]
        tags = [t for t in inp.tags if t.offset < inp.offset + n]
        out.items[:n] = self.process(inp.items[:n], inp.offset, tags)
        out.tags.extend(tags)
        return [n], [n]
