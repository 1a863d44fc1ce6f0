"""Receiver chain as flow-graph blocks, plus the one-call :func:`receive`.

Stages, one block each::

    source -> frame_detector -> cfo_correction -> symbol_alignment
           -> stream_to_vector(64) -> fft -> ofdm_equalizer -> frame_decoder

With ``fused=True`` the FFT and equalizer run as one ``fft_equalizer``
block, so the profiler attributes their combined cost to a single stage.
Frame boundaries travel downstream as ``"frame"`` tags.
"""

from __future__ import annotations

import numpy as np

from ..dsp.blocks import StreamToVector, VectorSource
from ..dsp.fft import SoftwareFftBackend
from ..runtime import COMPLEX32, Block, FlowGraph, InputWindow, Tag, complex_vector
from .decode import decode_data, decode_signal, make_event
from .equalizer import equalize_block, estimate_channel
from .frame import MAX_PSDU, FrameError, n_data_symbols
from .modulation import demap
from .params import DEFAULT_PARAMS, OfdmParams, mcs
from .sync import (
    ALIGN_SEARCH,
    ALIGN_THRESHOLD,
    DEFAULT_HOLDOFF,
    DEFAULT_PLATEAU,
    DEFAULT_THRESHOLD,
    DEFAULT_WINDOW,
    AlignmentError,
    CfoCorrector,
    FrameDetector,
    align_symbols,
    correct_cfo,
)

FRAME = "frame"
MAX_DATA_SYMBOLS = n_data_symbols(MAX_PSDU, mcs("BPSK-1/2"))


def _frame_tags(window) -> list:
    return sorted((t for t in window.tags if t.key == FRAME), key=lambda t: t.offset)


class FrameDetectorBlock(Block):
    """Pass samples through and tag each preamble trigger with its coarse CFO."""

    def __init__(self, params: OfdmParams = DEFAULT_PARAMS, threshold: float = DEFAULT_THRESHOLD,
                 plateau: int = DEFAULT_PLATEAU, window: int = DEFAULT_WINDOW,
                 holdoff: int = DEFAULT_HOLDOFF, name: str = "frame_detector"):
        super().__init__(name, [COMPLEX32], [COMPLEX32])
        self.detector = FrameDetector(params, threshold, plateau, window, holdoff)
        self.triggers = []

    def work(self, inputs, outputs):
        inp, out = inputs[0], outputs[0]
        n = min(len(inp), len(out))
        if n == 0:
            return [0], [0]
        out.items[:n] = inp.items[:n]
        out.tags.extend(t for t in inp.tags if t.offset < inp.offset + n)
        for trig in self.detector.process(inp.items[:n]):
            self.triggers.append(trig)
            out.tags.append(Tag(trig.index, FRAME, {"trigger": trig.index, "cfo": trig.cfo}))
        return [n], [n]


class CfoCorrectionBlock(Block):
    """Remove the coarse CFO of the most recent trigger, phase-referenced at the trigger."""

    def __init__(self, params: OfdmParams = DEFAULT_PARAMS, name: str = "cfo_correction"):
        super().__init__(name, [COMPLEX32], [COMPLEX32])
        self.corrector = CfoCorrector(params.sample_rate)

    def work(self, inputs, outputs):
        inp, out = inputs[0], outputs[0]
        n = min(len(inp), len(out))
        if n == 0:
            return [0], [0]
        off = inp.offset
        tags = [t for t in inp.tags if t.offset < off + n]
        cuts = [t for t in _frame_tags(inp) if t.offset < off + n]
        pos = off
        for t in cuts + [None]:
            stop = off + n if t is None else t.offset
            if stop > pos:
                out.items[pos - off:stop - off] = self.corrector.process(
                    inp.items[pos - off:stop - off], pos)
                pos = stop
            if t is not None:
                self.corrector.retune(t.value["cfo"], t.offset)
        out.tags.extend(tags)
        return [n], [n]


class SymbolAlignmentBlock(Block):
    """Find the LTF after each trigger and emit 64-sample FFT windows.

    Per frame the output is LTF1, LTF2, SIGNAL and up to the largest DATA
    symbol count, cyclic prefixes removed and fine CFO corrected. Emission
    stops early at the next trigger. ``backoff`` moves every FFT window that
    many samples into the cyclic prefix; the channel estimate absorbs the
    resulting linear phase.
    """

    def __init__(self, params: OfdmParams = DEFAULT_PARAMS, search: int = ALIGN_SEARCH,
                 threshold: float = ALIGN_THRESHOLD, backoff: int = 2,
                 name: str = "symbol_alignment"):
        super().__init__(name, [COMPLEX32], [COMPLEX32])
        if not 0 <= backoff < params.cp_len:
            raise ValueError("backoff must lie inside the cyclic prefix")
        self.params = params
        self.search = search
        self.threshold = threshold
        self.backoff = backoff
        self.max_symbols = 3 + MAX_DATA_SYMBOLS
        self.min_input = search + 2 * params.fft_size - 1
        self.min_output = params.fft_size
        self.dropped = []
        self._pending = None
        self._frame = None

    def _position(self, i: int) -> int:
        n, f = self.params.fft_size, self._frame
        if i < 2:
            return f["ltf"] + n * i
        return f["ltf"] + 2 * n + self.params.symbol_len * (i - 2) + self.params.cp_len

    def work(self, inputs, outputs):
        inp, out = inputs[0], outputs[0]
        p = self.params
        off, end = inp.offset, inp.offset + len(inp)
        tags = _frame_tags(inp)
        produced = 0
        pos = off
        while True:
            if self._frame is None and self._pending is None:
                nxt = next((t for t in tags if t.offset >= pos), None)
                if nxt is None:
                    pos = end
                    break
                self._pending = nxt
                pos = nxt.offset
            if self._pending is not None:
                t = self._pending.offset
                need = t + self.min_input
                if need > end:
                    if not inp.done:
                        break
                    self.dropped.append((t, "truncated"))
                    self._pending = None
                    pos = t + 1
                    continue
                try:
                    a = align_symbols(inp.items[t - off:need - off], 0, p, self.search, self.threshold)
                except AlignmentError as exc:
                    self.dropped.append((t, exc.reason))
                    self._pending = None
                    pos = t + 1
                    continue
                start = t + a.start
                self._frame = {
                    "next": 0, "ltf": start - self.backoff, "ref": start, "fine": a.cfo,
                    "coarse": self._pending.value["cfo"], "trigger": t,
                }
                self._pending = None
            f = self._frame
            i = f["next"]
            s = self._position(i)
            nxt = next((t for t in tags if t.offset > f["trigger"] and t.offset >= pos), None)
            if i >= self.max_symbols or (nxt is not None and s + p.fft_size > nxt.offset):
                self._frame = None
                continue
            if s + p.fft_size > end:
                if inp.done:
                    self._frame = None
                    pos = end
                    continue
                pos = min(max(pos, s), end)
                break
            if produced + p.fft_size > len(out):
                break
            x = inp.items[s - off:s - off + p.fft_size]
            out.items[produced:produced + p.fft_size] = correct_cfo(
                x, f["fine"], p.sample_rate, s - f["ref"])
            if i == 0:
                out.add_tag(produced, FRAME, {
                    "trigger": f["trigger"], "start": f["ref"] - 192,
                    "cfo": f["coarse"] + f["fine"],
                })
            produced += p.fft_size
            f["next"] = i + 1
            pos = s + p.fft_size
        return [pos - off], [produced]


class FftBlock(Block):
    """Forward FFT of each 64-sample vector through a pluggable backend."""

    def __init__(self, size: int = 64, backend=None, name: str = "fft"):
        super().__init__(name, [complex_vector(size)], [complex_vector(size)])
        self.size = size
        self.backend = backend or SoftwareFftBackend()

    def work(self, inputs, outputs):
        inp, out = inputs[0], outputs[0]
        k = min(len(inp), len(out))
        if k == 0:
            return [0], [0]
        out.items[:k] = self.backend.transform(np.asarray(inp.items[:k]))
        cost = getattr(self.backend, "last_cost", None)
        if cost is not None:
            self.report_offload(*cost)
        out.tags.extend(t for t in inp.tags if t.offset < inp.offset + k)
        return [k], [k]


class OfdmEqualizerBlock(Block):
    """Channel estimate from the LTF pair, SIGNAL decode, then per-symbol equalization.

    Emits the 48 data carriers of each DATA symbol; the first vector of a
    frame carries a tag with rate, length, start, CFO and per-carrier CSI.
    """

    def __init__(self, params: OfdmParams = DEFAULT_PARAMS, name: str = "ofdm_equalizer"):
        super().__init__(name, [complex_vector(params.fft_size)], [complex_vector(48)])
        self.params = params
        self.dropped = []
        self._st = None

    def _drop(self, reason: str):
        self.dropped.append((self._st["info"]["trigger"], reason))
        self._st = None

    def work(self, inputs, outputs):
        inp, out = inputs[0], outputs[0]
        off, n = inp.offset, len(inp)
        items = inp.items
        tags = {t.offset: t for t in _frame_tags(inp)}
        starts = sorted(tags)
        produced = 0
        i = 0
        while i < n:
            tag = tags.get(off + i)
            if tag is not None and (self._st is None or self._st["tag_at"] != off + i):
                self._st = {"stage": "ltf", "ltf": [], "info": tag.value, "tag_at": off + i}
            st = self._st
            nxt = next((s for s in starts if s > off + i), off + n) - off
            if st is None:
                i = nxt
                continue
            if st["stage"] == "ltf":
                st["ltf"].append(items[i])
                i += 1
                if len(st["ltf"]) == 2:
                    try:
                        st["est"] = estimate_channel(np.stack(st["ltf"]), self.params)
                    except FrameError as exc:
                        self._drop(exc.reason)
                        continue
                    st["csi"] = st["est"].csi(self.params)
                    st["stage"] = "signal"
            elif st["stage"] == "signal":
                i += 1
                try:
                    eq = equalize_block(items[i - 1], st["est"], 0, self.params)[0]
                    sig = decode_signal(demap(eq, "BPSK", st["csi"]))
                except FrameError as exc:
                    self._drop(exc.reason)
                    continue
                st.update(stage="data", mcs=sig.mcs, length=sig.length, emitted=0,
                          n_sym=n_data_symbols(sig.length, sig.mcs))
            else:
                count = min(st["n_sym"] - st["emitted"], nxt - i, len(out) - produced)
                if count <= 0:
                    break
                try:
                    eq = equalize_block(items[i:i + count], st["est"], 1 + st["emitted"], self.params)
                except FrameError as exc:
                    self._drop(exc.reason)
                    continue
                out.items[produced:produced + count] = eq
                if st["emitted"] == 0:
                    info = dict(st["info"], mcs=st["mcs"], length=st["length"],
                                n_sym=st["n_sym"], csi=st["csi"])
                    out.add_tag(produced, FRAME, info)
                produced += count
                st["emitted"] += count
                i += count
                if st["emitted"] == st["n_sym"]:
                    self._st = None
        return [i], [produced]


class FftEqualizerBlock(OfdmEqualizerBlock):
    """FFT and equalizer fused into one stage."""

    def __init__(self, params: OfdmParams = DEFAULT_PARAMS, backend=None,
                 name: str = "fft_equalizer"):
        super().__init__(params, name)
        self.backend = backend or SoftwareFftBackend()

    def work(self, inputs, outputs):
        inp = inputs[0]
        if len(inp):
            freq = self.backend.transform(np.asarray(inp.items))
            cost = getattr(self.backend, "last_cost", None)
            if cost is not None:
                self.report_offload(*cost)
            inputs = [InputWindow(freq, inp.offset, inp.tags, inp.done)]
        return super().work(inputs, outputs)


class FrameDecoderBlock(Block):
    """Sink that demaps, decodes and checks each frame, collecting :class:`FrameEvent`."""

    def __init__(self, name: str = "frame_decoder"):
        super().__init__(name, [complex_vector(48)], [])
        self.events = []
        self.dropped = []
        self._st = None

    def _finish(self):
        st, self._st = self._st, None
        info = st["info"]
        pts = np.concatenate(st["rows"])
        try:
            psdu, seed = decode_data(pts, info["mcs"], info["length"], info["csi"])
        except FrameError as exc:
            self.dropped.append((info["trigger"], exc.reason))
            return
        self.events.append(make_event(psdu, info["mcs"], info["start"], info["cfo"], seed))

    def work(self, inputs, outputs):
        inp = inputs[0]
        off, n = inp.offset, len(inp)
        tags = {t.offset: t for t in _frame_tags(inp)}
        starts = sorted(tags)
        i = 0
        while i < n:
            tag = tags.get(off + i)
            if tag is not None:
                if self._st is not None:
                    self.dropped.append((self._st["info"]["trigger"], "truncated"))
                self._st = {"info": tag.value, "rows": [], "got": 0}
            nxt = next((s for s in starts if s > off + i), off + n) - off
            st = self._st
            if st is None:
                i = nxt
                continue
            count = min(st["info"]["n_sym"] - st["got"], nxt - i)
            st["rows"].append(np.array(inp.items[i:i + count]))
            st["got"] += count
            i += count
            if st["got"] == st["info"]["n_sym"]:
                self._finish()
            elif i < nxt:
                break
        return [n], []


class Receiver:
    """The receiver flow graph and handles to its stage blocks."""

    def __init__(self, samples, params: OfdmParams = DEFAULT_PARAMS, backend=None,
                 threshold: float = DEFAULT_THRESHOLD, profiling: bool = True,
                 capacity: int = 4096, name: str = "wifi_rx", fused: bool = False):
        self.params = params
        self.source = VectorSource(np.asarray(samples, dtype=np.complex64), COMPLEX32, name="source")
        self.detector = FrameDetectorBlock(params, threshold)
        self.cfo = CfoCorrectionBlock(params)
        self.aligner = SymbolAlignmentBlock(params)
        self.vectorizer = StreamToVector(params.fft_size, name="stream_to_vector")
        if fused:
            self.fft = None
            self.equalizer = FftEqualizerBlock(params, backend)
        else:
            self.fft = FftBlock(params.fft_size, backend)
            self.equalizer = OfdmEqualizerBlock(params)
        self.decoder = FrameDecoderBlock()
        self.graph = FlowGraph(name, profiling=profiling)
        self.blocks = [b for b in (self.source, self.detector, self.cfo, self.aligner,
                                   self.vectorizer, self.fft, self.equalizer, self.decoder)
                       if b is not None]
        for b in self.blocks:
            self.graph.add(b)
        for a, b in zip(self.blocks, self.blocks[1:]):
            self.graph.connect(a, b, capacity)
        self.report = None

    def run(self, chunk: int | None = None, workers: int = 1):
        self.report = self.graph.run(chunk=chunk, workers=workers)
        return self.events

    @property
    def events(self) -> list:
        return sorted(self.decoder.events, key=lambda e: e.start)

    @property
    def dropped(self) -> list:
        out = []
        for b in (self.aligner, self.equalizer, self.decoder):
            out.extend((t, b.name, reason) for t, reason in b.dropped)
        return sorted(out)


def receive(samples, params: OfdmParams = DEFAULT_PARAMS, backend=None,
            threshold: float = DEFAULT_THRESHOLD, chunk: int | None = None,
            workers: int = 1) -> list:
    """Run the full receiver over a capture and return its frames in start order."""
    rx = Receiver(samples, params, backend, threshold)
    return rx.run(chunk=chunk, workers=workers)
