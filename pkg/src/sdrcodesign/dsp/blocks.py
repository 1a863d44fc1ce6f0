"""General-purpose stream blocks: sources, sinks, conversions and vectorisation."""

from __future__ import annotations

import time

import numpy as np

from ..runtime import COMPLEX32, INT32, REAL32, Block, SyncBlock, Tag, complex_vector
from .rng import GaussianStream


class VectorSource(Block):
    """Emit a fixed array once (or forever with ``repeat``), with optional tags."""

    def __init__(self, data, kind=COMPLEX32, name: str = "vector_source", tags=(), repeat=False):
        super().__init__(name, [], [kind])
        self.data = np.asarray(data, dtype=kind.dtype)
        if kind.vlen > 1:
            self.data = self.data.reshape(-1, kind.vlen)
        self.tags = sorted((Tag(*t) for t in tags), key=lambda t: t.offset)
        self.repeat = repeat
        self._pos = 0
        if len(self.data) == 0 and not repeat:
            self.finished = True

    def work(self, inputs, outputs):
        out = outputs[0]
        total = len(self.data)
        if self.repeat:
            n = len(out)
            idx = (np.arange(self._pos, self._pos + n) % total) if total else np.zeros(0, int)
            out.items[:n] = self.data[idx]
        else:
            n = min(len(out), total - self._pos)
            out.items[:n] = self.data[self._pos:self._pos + n]
            out.tags.extend(t for t in self.tags if self._pos <= t.offset < self._pos + n)
        self._pos += n
        if not self.repeat and self._pos >= total:
            self.finished = True
        return [], [n]


class NullSink(Block):
    def __init__(self, kind=COMPLEX32, name: str = "null_sink"):
        super().__init__(name, [kind], [])

    def work(self, inputs, outputs):
        return [len(inputs[0])], []


class VectorSink(Block):
    """Capture everything (items and tags) that reaches the sink."""

    def __init__(self, kind=COMPLEX32, name: str = "vector_sink"):
        super().__init__(name, [kind], [])
        self.kind = kind
        self._chunks = []
        self.tags = []

    def work(self, inputs, outputs):
        inp = inputs[0]
        if len(inp):
            self._chunks.append(np.array(inp.items))
            self.tags.extend(inp.tags)
        return [len(inp)], []

    def data(self) -> np.ndarray:
        if not self._chunks:
            return np.zeros((0,) + self.kind.shape, dtype=self.kind.dtype)
        return np.concatenate(self._chunks)


class CosineSource(Block):
    """Complex tone ``amplitude * exp(j 2 pi f n / fs)`` starting at n = 0."""

    def __init__(self, frequency: float, sample_rate: float, amplitude: float = 1.0,
                 name: str = "cosine_source"):
        if sample_rate <= 0:
            raise ValueError("sample_rate must be positive")
        if not 0 <= frequency < sample_rate / 2:
            raise ValueError("frequency must satisfy 0 <= f < sample_rate / 2")
        if amplitude < 0:
            raise ValueError("amplitude must be non-negative")
        super().__init__(name, [], [COMPLEX32])
        self.frequency = float(frequency)
        self.sample_rate = float(sample_rate)
        self.amplitude = float(amplitude)
        self._n = 0

    def samples(self, start: int, count: int) -> np.ndarray:
        n = np.arange(start, start + count, dtype=np.float64)
        cycles = np.mod(self.frequency * n, self.sample_rate) / self.sample_rate
        return self.amplitude * np.exp(2j * np.pi * cycles)

    def work(self, inputs, outputs):
        out = outputs[0]
        n = len(out)
        out.items[:] = self.samples(self._n, n)
        self._n += n
        return [], [n]


class GaussianNoiseAdder(SyncBlock):
    """Add circular complex Gaussian noise, ``stddev`` per component, seeded."""

    def __init__(self, seed: int, stddev: float, name: str = "noise_adder"):
        if stddev < 0:
            raise ValueError("stddev must be >= 0")
        super().__init__(name, [COMPLEX32], [COMPLEX32])
        self.stddev = float(stddev)
        self._rng = GaussianStream(seed)

    def process(self, items, offset, tags):
        if self.stddev == 0.0:
            return items
        return items + self.stddev * self._rng.complex_normal(len(items))


class Throttle(SyncBlock):
    """Pass-through that caps the long-run emission rate to ``rate`` items/s."""

    def __init__(self, rate: float | None, kind=COMPLEX32, name: str = "throttle",
                 unbounded: bool = False):
        if not unbounded and (rate is None or rate <= 0):
            raise ValueError("rate must be > 0 unless unbounded")
        super().__init__(name, [kind], [kind])
        self.rate = rate
        self.unbounded = unbounded
        self._start = None
        self._emitted = 0

    def work(self, inputs, outputs):
        if not self.unbounded:
            # keep bursts short so the emission stays smooth
            limit = max(1, int(self.rate * 0.02))
            inputs = [type(inputs[0])(inputs[0].items[:limit], inputs[0].offset,
                                      inputs[0].tags, inputs[0].done)]
        return super().work(inputs, outputs)

    def process(self, items, offset, tags):
        if self.unbounded:
            return items
        now = time.monotonic()
        if self._start is None:
            self._start = now
        self._emitted += len(items)
        wait = self._start + self._emitted / self.rate - now
        if wait > 0:
            time.sleep(wait)
        return items


class StreamToVector(Block):
    """Group ``n`` consecutive items into one vector item.

    A trailing partial group stays in the block's state and is never flushed.
    Tags move to the vector containing the tagged item.
    """

    def __init__(self, n: int, name: str = "stream_to_vector"):
        if n < 1:
            raise ValueError("arity must be >= 1")
        super().__init__(name, [COMPLEX32], [complex_vector(n)])
        self.n = n
        self._partial = np.zeros(0, dtype=np.complex64)
        self._tags = []

    @property
    def retained(self) -> int:
        return len(self._partial)

    def work(self, inputs, outputs):
        inp, out = inputs[0], outputs[0]
        take = min(len(inp), len(out) * self.n - len(self._partial))
        if take <= 0:
            return [0], [0]
        buf = np.concatenate([self._partial, inp.items[:take]])
        nvec = len(buf) // self.n
        out.items[:nvec] = buf[: nvec * self.n].reshape(nvec, self.n)
        self._partial = buf[nvec * self.n:].copy()
        # a tag waits until the vector holding its item is complete
        self._tags.extend(Tag(t.offset // self.n, t.key, t.value)
                          for t in inp.tags if t.offset < inp.offset + take)
        ready = out.offset + nvec
        out.tags.extend(t for t in self._tags if t.offset < ready)
        self._tags = [t for t in self._tags if t.offset >= ready]
        return [take], [nvec]


class VectorToStream(Block):
    """Flatten vector items back into a scalar stream."""

    def __init__(self, n: int, name: str = "vector_to_stream"):
        super().__init__(name, [complex_vector(n)], [COMPLEX32])
        self.n = n
        self.min_output = n

    def work(self, inputs, outputs):
        inp, out = inputs[0], outputs[0]
        k = min(len(inp), len(out) // self.n)
        out.items[: k * self.n] = np.asarray(inp.items[:k]).reshape(-1)
        for t in inp.tags:
            if t.offset < inp.offset + k:
                out.tags.append(Tag(t.offset * self.n, t.key, t.value))
        return [k], [k * self.n]


class IntToFloat(SyncBlock):
    """``y = x / scale`` from int32 to real32."""

    def __init__(self, scale: float = 1.0, name: str = "int_to_float"):
        if scale == 0:
            raise ValueError("scale must be nonzero")
        super().__init__(name, [INT32], [REAL32])
        self.scale = float(scale)

    def process(self, items, offset, tags):
        return int_to_float(items, self.scale)


class FloatToInt(SyncBlock):
    """``y = round(x * scale)`` (ties to even), saturated to int32."""

    def __init__(self, scale: float = 1.0, name: str = "float_to_int"):
        if scale == 0:
            raise ValueError("scale must be nonzero")
        super().__init__(name, [REAL32], [INT32])
        self.scale = float(scale)

    def process(self, items, offset, tags):
        return float_to_int(items, self.scale)


class ComplexToReal(SyncBlock):
    def __init__(self, name: str = "complex_to_real"):
        super().__init__(name, [COMPLEX32], [REAL32])

    def process(self, items, offset, tags):
        return np.real(items)


def int_to_float(x, scale: float) -> np.ndarray:
    return (np.asarray(x, dtype=np.float64) / scale).astype(np.float32)


def float_to_int(x, scale: float) -> np.ndarray:
    y = np.rint(np.asarray(x, dtype=np.float64) * scale)
    return np.clip(y, -2**31, 2**31 - 1).astype(np.int32)
