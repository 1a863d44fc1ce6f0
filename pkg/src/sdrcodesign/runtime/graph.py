"""Flow graph construction and validation."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from .block import Block, BlockCounters
from .buffer import RingBuffer

DEFAULT_CAPACITY = 4096
DEFAULT_NOMINAL_HZ = 666e6


class GraphError(ValueError):
    pass


class KindMismatchError(GraphError):
    pass


class DuplicateConnectionError(GraphError):
    pass


class UnknownPortError(GraphError):
    pass


@dataclass
class Edge:
    src: Block
    src_port: int
    dst: Block
    dst_port: int
    buffer: RingBuffer

    @property
    def name(self) -> str:
        return f"{self.src.name}:{self.src_port}->{self.dst.name}:{self.dst_port}"


@dataclass
class ValidationReport:
    errors: list = field(default_factory=list)
    unconnected: list = field(default_factory=list)
    cycles: list = field(default_factory=list)
    n_blocks: int = 0

    @property
    def runnable(self) -> bool:
        return not self.errors


@dataclass(frozen=True)
class CounterSnapshot:
    timestamp: float
    nominal_hz: float
    blocks: tuple

    def __getitem__(self, name: str) -> BlockCounters:
        for b in self.blocks:
            if b.name == name:
                return b
        raise KeyError(name)

    def names(self) -> list:
        return [b.name for b in self.blocks]


def _endpoint(ep):
    if isinstance(ep, Block):
        return ep, 0
    block, port = ep
    return block, int(port)


class FlowGraph:
    """Directed graph of blocks joined by bounded ring buffers."""

    def __init__(self, name: str = "flowgraph", nominal_hz: float = DEFAULT_NOMINAL_HZ,
                 profiling: bool = True):
        self.name = name
        self.nominal_hz = nominal_hz
        self.profiling = profiling
        self.blocks: list[Block] = []
        self.edges: list[Edge] = []
        self.validated = False
        self.has_run = False

    def add(self, *blocks: Block):
        for block in blocks:
            if block in self.blocks:
                continue
            if any(b.name == block.name for b in self.blocks):
                raise GraphError(f"duplicate block name {block.name!r}")
            block.counters.enabled = self.profiling
            self.blocks.append(block)
        self.validated = False
        return blocks[0] if len(blocks) == 1 else blocks

    def block(self, name: str) -> Block:
        for b in self.blocks:
            if b.name == name:
                return b
        raise KeyError(name)

    def connect(self, src, dst, capacity: int = DEFAULT_CAPACITY) -> "FlowGraph":
        """Join ``src`` (block or ``(block, port)``) to ``dst`` through a new buffer."""
        sblock, sport = _endpoint(src)
        dblock, dport = _endpoint(dst)
        if not 0 <= sport < len(sblock.outputs):
            raise UnknownPortError(f"{sblock.name} has no output port {sport}")
        if not 0 <= dport < len(dblock.inputs):
            raise UnknownPortError(f"{dblock.name} has no input port {dport}")
        skind = sblock.outputs[sport].kind
        dkind = dblock.inputs[dport].kind
        if skind != dkind:
            raise KindMismatchError(
                f"{sblock.name}:{sport} emits {skind.name}, {dblock.name}:{dport} takes {dkind.name}"
            )
        for e in self.edges:
            if e.dst is dblock and e.dst_port == dport:
                raise DuplicateConnectionError(f"{dblock.name}:{dport} is already connected")
        self.add(sblock)
        self.add(dblock)
        self.edges.append(Edge(sblock, sport, dblock, dport, RingBuffer(capacity, skind)))
        self.validated = False
        return self

    def chain(self, *blocks: Block, capacity: int = DEFAULT_CAPACITY) -> "FlowGraph":
        for a, b in zip(blocks, blocks[1:]):
            self.connect(a, b, capacity)
        return self

    def in_edge(self, block: Block, port: int):
        for e in self.edges:
            if e.dst is block and e.dst_port == port:
                return e
        return None

    def out_edges(self, block: Block, port: int) -> list:
        return [e for e in self.edges if e.src is block and e.src_port == port]

    def edge(self, name: str) -> Edge:
        for e in self.edges:
            if e.name == name:
                return e
        raise KeyError(name)

    def validate(self) -> ValidationReport:
        rep = ValidationReport(n_blocks=len(self.blocks))
        for b in self.blocks:
            for p in range(len(b.inputs)):
                if self.in_edge(b, p) is None:
                    rep.unconnected.append(f"{b.name}:in{p}")
            for p in range(len(b.outputs)):
                if not self.out_edges(b, p):
                    rep.unconnected.append(f"{b.name}:out{p}")
        for name in rep.unconnected:
            rep.errors.append(f"unconnected port {name}")
        for e in self.edges:
            if e.src.outputs[e.src_port].kind != e.dst.inputs[e.dst_port].kind:
                rep.errors.append(f"kind mismatch on {e.name}")
        rep.cycles = self._cycles()
        for cyc in rep.cycles:
            rep.errors.append("cycle through " + ", ".join(cyc))
        self.validated = rep.runnable
        return rep

    def _cycles(self) -> list:
        # Tarjan's strongly connected components; any SCC with >1 node or a
        # self loop is a cycle.
        succ = {b.name: [] for b in self.blocks}
        for e in self.edges:
            succ[e.src.name].append(e.dst.name)
        index, low, on_stack, stack, out = {}, {}, set(), [], []
        counter = [0]

        def strong(v):
            index[v] = low[v] = counter[0]
            counter[0] += 1
            stack.append(v)
            on_stack.add(v)
            for w in succ[v]:
                if w not in index:
                    strong(w)
                    low[v] = min(low[v], low[w])
                elif w in on_stack:
                    low[v] = min(low[v], index[w])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                if len(comp) > 1 or v in succ[v]:
                    out.append(sorted(comp))

        for b in self.blocks:
            if b.name not in index:
                strong(b.name)
        return out

    def topological_order(self) -> list:
        indeg = {b.name: 0 for b in self.blocks}
        for e in self.edges:
            indeg[e.dst.name] += 1
        ready = [b for b in self.blocks if indeg[b.name] == 0]
        order = []
        while ready:
            b = ready.pop(0)
            order.append(b)
            for e in self.edges:
                if e.src is b:
                    indeg[e.dst.name] -= 1
                    if indeg[e.dst.name] == 0 and e.dst not in order and e.dst not in ready:
                        ready.append(e.dst)
        return order

    def snapshot_counters(self) -> CounterSnapshot:
        return CounterSnapshot(
            timestamp=time.time(),
            nominal_hz=self.nominal_hz,
            blocks=tuple(b.counters.snapshot(b.name, self.nominal_hz) for b in self.blocks),
        )

    def run(self, termination=None, chunk: int | None = None, workers: int = 1):
        from .scheduler import run

        return run(self, termination=termination, chunk=chunk, workers=workers)


def connect(graph: FlowGraph, src, dst, capacity: int = DEFAULT_CAPACITY) -> FlowGraph:
    return graph.connect(src, dst, capacity)


def validate(graph: FlowGraph) -> ValidationReport:
    return graph.validate()


def snapshot_counters(graph: FlowGraph) -> CounterSnapshot:
    return graph.snapshot_counters()
