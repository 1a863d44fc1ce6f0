"""Round-robin scheduler with optional worker threads."""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass

import numpy as np

from .block import InputWindow, OutputWindow
from .graph import CounterSnapshot, FlowGraph, GraphError


class DeadlockError(RuntimeError):
    def __init__(self, edges):
        self.edges = list(edges)
        names = ", ".join(self.edges) if self.edges else "none identified"
        super().__init__(f"deadlock: no block can make progress; saturated edge(s): {names}")


class BlockError(RuntimeError):
    def __init__(self, block_name, exc):
        self.block_name = block_name
        super().__init__(f"block {block_name!r} failed: {exc}")


@dataclass(frozen=True)
class Termination:
    """When to stop feeding sources: ``exhaustion``, ``items`` or ``wallclock``."""

    kind: str = "exhaustion"
    limit: float | None = None

    @classmethod
    def exhaustion(cls):
        return cls("exhaustion")

    @classmethod
    def items(cls, n: int):
        return cls("items", int(n))

    @classmethod
    def wallclock(cls, seconds: float):
        return cls("wallclock", float(seconds))


@dataclass(frozen=True)
class EdgeStats:
    name: str
    capacity: int
    item_bytes: int
    high_water: int
    produced: int
    consumed: int
    occupancy: int


@dataclass(frozen=True)
class RunReport:
    counters: CounterSnapshot
    edges: tuple
    elapsed_s: float
    termination: str
    chunk: int | None
    workers: int

    def edge(self, name: str) -> EdgeStats:
        for e in self.edges:
            if e.name == name:
                return e
        raise KeyError(name)


class _Node:
    __slots__ = ("block", "in_edges", "out_edges", "done", "emitted", "lock", "is_source")

    def __init__(self, graph, block):
        self.block = block
        self.in_edges = [graph.in_edge(block, p) for p in range(len(block.inputs))]
        self.out_edges = [graph.out_edges(block, p) for p in range(len(block.outputs))]
        self.done = False
        self.emitted = 0
        self.lock = threading.Lock()
        self.is_source = not block.inputs


class _Run:
    def __init__(self, graph: FlowGraph, termination: Termination, chunk, workers):
        self.graph = graph
        self.term = termination
        self.chunk = chunk if chunk and chunk > 0 else None
        self.workers = max(1, int(workers))
        self.nodes = [_Node(graph, b) for b in graph.topological_order()]
        self.by_block = {id(n.block): n for n in self.nodes}
        self.deadline = None
        if termination.kind == "wallclock":
            self.deadline = time.monotonic() + float(termination.limit)

    def _finish_sources(self):
        for n in self.nodes:
            if n.is_source:
                n.block.finished = True

    def activate(self, node: _Node) -> bool:
        b = node.block
        cap = self.chunk
        if node.is_source and b.finished:
            node.done = True
            return True
        ins = []
        for e in node.in_edges:
            # read the producer's done flag before the indices: items are
            # always committed before a producer is marked done
            upstream_done = self.by_block[id(e.src)].done
            r, w = e.buffer.indices()
            avail = w - r
            n = avail if cap is None else min(avail, max(cap, b.min_input))
            full = upstream_done and n == avail
            if n < b.min_input and not full:
                return False
            ins.append((e, r, n, full))
        outs = []
        for edges in node.out_edges:
            space = min(e.buffer.space for e in edges)
            if cap is not None:
                space = min(space, max(cap, b.min_output))
            if node.is_source and self.term.kind == "items":
                left = int(self.term.limit) - node.emitted
                if left <= 0:
                    b.finished = True
                    node.done = True
                    return True
                space = min(space, left)
            if space < b.min_output and not (node.is_source and space > 0 and self.term.kind == "items"):
                return False
            outs.append((edges, space))

        in_windows = [
            InputWindow(e.buffer.peek(n), r, e.buffer.tags_in(r, r + n), full)
            for e, r, n, full in ins
        ]
        out_windows = []
        for edges, space in outs:
            kind = edges[0].buffer.kind
            items = np.empty((space,) + kind.shape, dtype=kind.dtype)
            out_windows.append(OutputWindow(items, edges[0].buffer.write_index))
        try:
            consumed, produced = b.call_work(in_windows, out_windows)
        except Exception as exc:
            raise BlockError(b.name, exc) from exc

        for (edges, _), win, p in zip(outs, out_windows, produced):
            if p:
                tags = [t for t in win.tags if win.offset <= t.offset < win.offset + p]
                for e in edges:
                    e.buffer.write(win.items[:p], tags)
        for (e, _, _, _), c in zip(ins, consumed):
            if c:
                e.buffer.consume(c)
        if node.is_source:
            node.emitted += sum(produced)
            if self.term.kind == "items" and node.emitted >= int(self.term.limit):
                b.finished = True
            if b.finished:
                node.done = True
                return True
        else:
            drained = all(full and c == n for (_, _, n, full), c in zip(ins, consumed))
            if drained and sum(consumed) == 0 and sum(produced) == 0:
                node.done = True
                return True
        return sum(consumed) + sum(produced) > 0

    def saturated_edges(self):
        names = []
        for node in self.nodes:
            if node.done:
                continue
            for e in node.in_edges:
                if e.buffer.space == 0 or e.buffer.capacity < node.block.min_input:
                    names.append(e.name)
        return names

    def all_done(self):
        return all(n.done for n in self.nodes)

    def check_deadline(self) -> bool:
        if self.deadline is not None and time.monotonic() >= self.deadline:
            self.deadline = None
            self._finish_sources()
            return True
        return False

    def run_single(self):
        while not self.all_done():
            progress = self.check_deadline()
            for node in self.nodes:
                if not node.done:
                    progress = self.activate(node) or progress
            if not progress and not self.all_done():
                raise DeadlockError(self.saturated_edges())

    def run_threaded(self):
        cond = threading.Condition()
        state = {"version": 0, "idle": {}, "stop": False, "error": None}
        parts = [self.nodes[i::self.workers] for i in range(self.workers)]

        def worker(wid, mine):
            try:
                while True:
                    with cond:
                        if state["stop"]:
                            return
                        start = state["version"]
                    progress = False
                    for node in mine:
                        if node.done:
                            continue
                        with node.lock:
                            progress = self.activate(node) or progress
                    with cond:
                        if self.check_deadline():
                            progress = True
                        if progress:
                            state["version"] += 1
                            state["idle"].clear()
                            cond.notify_all()
                            continue
                        if self.all_done():
                            state["stop"] = True
                            cond.notify_all()
                            return
                        state["idle"][wid] = start
                        if len(state["idle"]) == self.workers and all(
                            v == state["version"] for v in state["idle"].values()
                        ):
                            state["stop"] = True
                            state["error"] = DeadlockError(self.saturated_edges())
                            cond.notify_all()
                            return
                        cond.wait(timeout=0.002)
            except BaseException as exc:  # propagate to the caller's thread
                with cond:
                    state["stop"] = True
                    if state["error"] is None:
                        state["error"] = exc
                    cond.notify_all()

        threads = [threading.Thread(target=worker, args=(i, p), daemon=True)
                   for i, p in enumerate(parts)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        if state["error"] is not None:
            raise state["error"]


def run(graph: FlowGraph, termination: Termination | None = None, chunk: int | None = None,
        workers: int = 1) -> RunReport:
    """Execute ``graph`` until ``termination``; sources are drained before returning.

    ``chunk`` caps the items offered to a block per activation (never below
    the block's own minimum window). ``workers`` > 1 runs blocks on threads;
    a block is never entered by two threads at once.
    """
    if graph.has_run:
        raise GraphError("a flow graph can only be run once")
    rep = graph.validate()
    if not rep.runnable:
        raise GraphError("graph is not runnable: " + "; ".join(rep.errors))
    termination = termination or Termination.exhaustion()
    graph.has_run = True
    r = _Run(graph, termination, chunk, workers)
    t0 = time.perf_counter()
    if r.workers == 1:
        r.run_single()
    else:
        r.run_threaded()
    elapsed = time.perf_counter() - t0
    edges = tuple(
        EdgeStats(
            name=e.name,
            capacity=e.buffer.capacity,
            item_bytes=e.buffer.kind.itemsize,
            high_water=e.buffer.high_water,
            produced=e.buffer.write_index,
            consumed=e.buffer.read_index,
            occupancy=e.buffer.write_index - e.buffer.read_index,
        )
        for e in graph.edges
    )
    return RunReport(
        counters=graph.snapshot_counters(),
        edges=edges,
        elapsed_s=elapsed,
        termination=termination.kind,
        chunk=r.chunk,
        workers=r.workers,
    )
