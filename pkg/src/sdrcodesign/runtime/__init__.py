"""Flow-graph runtime: blocks, bounded buffers, scheduler and counters."""

from .block import Block, BlockCounters, InputWindow, OutputWindow, PerfCounters, Port, SyncBlock
from .buffer import BYTE, COMPLEX32, INT32, REAL32, ItemKind, RingBuffer, Tag, complex_vector
from .graph import (
    DEFAULT_CAPACITY,
    DEFAULT_NOMINAL_HZ,
    CounterSnapshot,
    DuplicateConnectionError,
    Edge,
    FlowGraph,
    GraphError,
    KindMismatchError,
    UnknownPortError,
    ValidationReport,
    connect,
    snapshot_counters,
    validate,
)
from .scheduler import BlockError, DeadlockError, EdgeStats, RunReport, Termination, run

__all__ = [
    "BYTE", "COMPLEX32", "INT32", "REAL32", "DEFAULT_CAPACITY", "DEFAULT_NOMINAL_HZ",
    "Block", "BlockCounters", "BlockError", "CounterSnapshot", "DeadlockError",
    "DuplicateConnectionError", "Edge", "EdgeStats", "FlowGraph", "GraphError", "InputWindow",
    "ItemKind", "KindMismatchError", "OutputWindow", "PerfCounters", "Port", "RingBuffer",
    "RunReport", "SyncBlock", "Tag", "Termination", "UnknownPortError", "ValidationReport",
    "complex_vector", "connect", "run", "snapshot_counters", "validate",
]
