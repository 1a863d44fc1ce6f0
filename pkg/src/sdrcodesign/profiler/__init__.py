"""Per-block utilization, buffer occupancy and run comparison reports."""

from .export import export, parse, rounded_shares
from .reports import (
    SCHEMA_VERSION,
    BlockShare,
    BufferReport,
    ComparisonReport,
    Delta,
    EdgeOccupancy,
    NameMismatchError,
    Profile,
    UtilizationReport,
    buffers,
    compare,
    profile,
    utilization,
)

__all__ = [
    "SCHEMA_VERSION", "BlockShare", "BufferReport", "ComparisonReport", "Delta", "EdgeOccupancy",
    "NameMismatchError", "Profile", "UtilizationReport", "buffers", "compare", "export",
    "parse", "profile", "rounded_shares", "utilization",
]
