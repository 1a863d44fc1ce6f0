"""Utilization, buffer occupancy and A/B comparison reports."""

from __future__ import annotations

from dataclasses import dataclass

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class BlockShare:
    name: str
    calls: int
    time_ns: int
    cycles: int
    modeled_ns: int
    pct: float


@dataclass(frozen=True)
class UtilizationReport:
    """Per-block share of the total derived cycles, largest share first."""

    nominal_hz: float
    total_cycles: int
    blocks: tuple

    @property
    def zero_total(self) -> bool:
        return self.total_cycles == 0

    def share(self, name: str) -> BlockShare:
        for b in self.blocks:
            if b.name == name:
                return b
        raise KeyError(name)

    def percents(self) -> dict:
        return {b.name: b.pct for b in self.blocks}


def utilization(snapshot) -> UtilizationReport:
    """Shares of total cycles from a :class:`CounterSnapshot` (or a run report)."""
    snapshot = getattr(snapshot, "counters", snapshot)
    total = sum(b.cycles for b in snapshot.blocks)
    rows = [
        BlockShare(b.name, b.calls, b.time_ns, b.cycles, b.modeled_ns,
                   100.0 * b.cycles / total if total else 0.0)
        for b in snapshot.blocks
    ]
    rows.sort(key=lambda r: (-r.cycles, r.name))
    return UtilizationReport(float(snapshot.nominal_hz), total, tuple(rows))


@dataclass(frozen=True)
class EdgeOccupancy:
    name: str
    capacity: int
    item_bytes: int
    high_water: int

    @property
    def pct(self) -> float:
        return 100.0 * self.high_water / self.capacity if self.capacity else 0.0

    @property
    def bytes_high_water(self) -> int:
        return self.high_water * self.item_bytes


@dataclass(frozen=True)
class BufferReport:
    edges: tuple

    def edge(self, name: str) -> EdgeOccupancy:
        for e in self.edges:
            if e.name == name:
                return e
        raise KeyError(name)

    @property
    def total_bytes_high_water(self) -> int:
        return sum(e.bytes_high_water for e in self.edges)


def buffers(run) -> BufferReport:
    """High-water occupancy of every edge of a completed run, sorted by name."""
    rows = [EdgeOccupancy(e.name, e.capacity, e.item_bytes, e.high_water) for e in run.edges]
    rows.sort(key=lambda r: r.name)
    return BufferReport(tuple(rows))


@dataclass(frozen=True)
class Profile:
    """Utilization and buffer reports of one run, the unit of export and comparison."""

    utilization: UtilizationReport
    buffers: BufferReport


def profile(run) -> Profile:
    return Profile(utilization(run.counters), buffers(run))


def _as_profile(x) -> Profile:
    if isinstance(x, Profile):
        return x
    if isinstance(x, dict):
        return Profile(utilization(x["snapshot"]), x.get("buffers") or BufferReport(()))
    return profile(x)


@dataclass(frozen=True)
class Delta:
    """``delta = b - a``: negative means run B is cheaper.

    ``delta_pct`` is relative to A and is None when A is zero but B is not.
    """

    key: str
    metric: str
    a: float
    b: float

    @property
    def delta(self) -> float:
        return self.b - self.a

    @property
    def delta_pct(self) -> float | None:
        if self.a == 0:
            return 0.0 if self.b == 0 else None
        return 100.0 * (self.b - self.a) / self.a


@dataclass(frozen=True)
class ComparisonReport:
    nominal_hz: float
    rows: tuple

    def get(self, key: str, metric: str) -> Delta:
        for r in self.rows:
            if r.key == key and r.metric == metric:
                return r
        raise KeyError((key, metric))

    def block(self, name: str, metric: str = "cycles") -> Delta:
        return self.get(f"block:{name}", metric)

    def edge(self, name: str, metric: str = "high_water") -> Delta:
        return self.get(f"edge:{name}", metric)


class NameMismatchError(ValueError):
    pass


BLOCK_METRICS = ("cycles", "time_ns", "modeled_ns", "effective_ns")
EDGE_METRICS = ("high_water", "bytes_high_water")


def _block_values(b: BlockShare) -> dict:
    return {"cycles": b.cycles, "time_ns": b.time_ns, "modeled_ns": b.modeled_ns,
            "effective_ns": b.time_ns + b.modeled_ns}


def compare(a, b) -> ComparisonReport:
    """Pair every block and edge metric of two runs of the same graph.

    ``effective_ns`` adds a block's modeled accelerator time to its host
    time, the latency the stage would see with the device attached.
    """
    pa, pb = _as_profile(a), _as_profile(b)
    ba = {x.name: x for x in pa.utilization.blocks}
    bb = {x.name: x for x in pb.utilization.blocks}
    ea = {x.name: x for x in pa.buffers.edges}
    eb = {x.name: x for x in pb.buffers.edges}
    if set(ba) != set(bb) or set(ea) != set(eb):
        diff = sorted(set(ba) ^ set(bb)) + sorted(set(ea) ^ set(eb))
        raise NameMismatchError(f"runs differ in block/edge names: {diff}")
    rows = []
    for name in sorted(ba):
        va, vb = _block_values(ba[name]), _block_values(bb[name])
        rows.extend(Delta(f"block:{name}", m, va[m], vb[m]) for m in BLOCK_METRICS)
    for name in sorted(ea):
        rows.append(Delta(f"edge:{name}", "high_water", ea[name].high_water, eb[name].high_water))
        rows.append(Delta(f"edge:{name}", "bytes_high_water",
                          ea[name].bytes_high_water, eb[name].bytes_high_water))
    rows.append(Delta("total", "cycles", pa.utilization.total_cycles, pb.utilization.total_cycles))
    rows.append(Delta("total", "bytes_high_water", pa.buffers.total_bytes_high_water,
                      pb.buffers.total_bytes_high_water))
    return ComparisonReport(pa.utilization.nominal_hz, tuple(rows))
