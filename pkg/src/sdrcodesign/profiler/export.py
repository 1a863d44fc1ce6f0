"""JSON and CSV serialization of profiler reports.

Profile JSON::

    {"schema_version": 1, "kind": "profile", "nominal_hz": ...,
     "blocks": [{"name", "calls", "time_ns", "cycles", "modeled_ns", "pct"}],
     "edges": [{"name", "capacity", "item_bytes", "high_water", "pct"}]}

Profile CSV columns: ``kind, name, calls, time_ns, cycles, modeled_ns,
capacity, item_bytes, high_water, pct`` with one row per block then per edge.
Block percents are rounded to hundredths by largest remainder so the
exported column sums to exactly 100.00 whenever any cycles were recorded.

Comparison JSON/CSV rows carry ``key, metric, a, b, delta, delta_pct``.
"""

from __future__ import annotations

import csv
import io
import json

from .reports import (
    SCHEMA_VERSION,
    BlockShare,
    BufferReport,
    ComparisonReport,
    Delta,
    EdgeOccupancy,
    Profile,
    UtilizationReport,
)

PROFILE_COLUMNS = ("kind", "name", "calls", "time_ns", "cycles", "modeled_ns",
                   "capacity", "item_bytes", "high_water", "pct")
COMPARISON_COLUMNS = ("key", "metric", "a", "b", "delta", "delta_pct")


def rounded_shares(cycles) -> list:
    """Percent shares in hundredths, rounded so they total 10000 exactly."""
    cycles = [int(c) for c in cycles]
    total = sum(cycles)
    if total == 0:
        return [0] * len(cycles)
    exact = [c * 10000 for c in cycles]
    base = [e // total for e in exact]
    short = 10000 - sum(base)
    order = sorted(range(len(cycles)), key=lambda i: (-(exact[i] % total), i))
    for i in order[:short]:
        base[i] += 1
    return base


def _pct(hundredths: int) -> str:
    return f"{hundredths // 100}.{hundredths % 100:02d}"


def _edge_pct(e: EdgeOccupancy) -> str:
    return f"{e.pct:.2f}"


def _profile_of(report) -> Profile:
    if isinstance(report, Profile):
        return report
    if isinstance(report, UtilizationReport):
        return Profile(report, BufferReport(()))
    if isinstance(report, BufferReport):
        return Profile(UtilizationReport(0.0, 0, ()), report)
    raise TypeError(f"cannot export {type(report).__name__}")


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(round(x, 6))
    return str(x)


def export(report, fmt: str = "json") -> bytes:
    """Serialize a profile, utilization, buffer or comparison report."""
    if fmt not in ("json", "csv"):
        raise ValueError(f"unknown format {fmt!r}")
    if isinstance(report, ComparisonReport):
        return _export_comparison(report, fmt)
    p = _profile_of(report)
    blocks = p.utilization.blocks
    shares = rounded_shares(b.cycles for b in blocks)
    if fmt == "json":
        doc = {
            "schema_version": SCHEMA_VERSION,
            "kind": "profile",
            "nominal_hz": p.utilization.nominal_hz,
            "blocks": [
                {"name": b.name, "calls": b.calls, "time_ns": b.time_ns, "cycles": b.cycles,
                 "modeled_ns": b.modeled_ns, "pct": float(_pct(s))}
                for b, s in zip(blocks, shares)
            ],
            "edges": [
                {"name": e.name, "capacity": e.capacity, "item_bytes": e.item_bytes,
                 "high_water": e.high_water, "pct": float(_edge_pct(e))}
                for e in p.buffers.edges
            ],
        }
        return (json.dumps(doc, indent=2) + "\n").encode()
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(PROFILE_COLUMNS)
    for b, s in zip(blocks, shares):
        w.writerow(["block", b.name, b.calls, b.time_ns, b.cycles, b.modeled_ns, "", "", "", _pct(s)])
    for e in p.buffers.edges:
        w.writerow(["edge", e.name, "", "", "", "", e.capacity, e.item_bytes, e.high_water, _edge_pct(e)])
    return buf.getvalue().encode()


def _export_comparison(report: ComparisonReport, fmt: str) -> bytes:
    if fmt == "json":
        doc = {
            "schema_version": SCHEMA_VERSION,
            "kind": "comparison",
            "nominal_hz": report.nominal_hz,
            "rows": [
                {"key": r.key, "metric": r.metric, "a": r.a, "b": r.b, "delta": r.delta,
                 "delta_pct": None if r.delta_pct is None else round(r.delta_pct, 6)}
                for r in report.rows
            ],
        }
        return (json.dumps(doc, indent=2) + "\n").encode()
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COMPARISON_COLUMNS)
    for r in report.rows:
        w.writerow([r.key, r.metric, _fmt(r.a), _fmt(r.b), _fmt(r.delta), _fmt(r.delta_pct)])
    return buf.getvalue().encode()


def _blocks_total(rows) -> int:
    return sum(b.cycles for b in rows)


def _make_profile(nominal_hz, blocks, edges) -> Profile:
    total = _blocks_total(blocks)
    blocks = tuple(
        BlockShare(b.name, b.calls, b.time_ns, b.cycles, b.modeled_ns,
                   100.0 * b.cycles / total if total else 0.0)
        for b in blocks
    )
    return Profile(UtilizationReport(float(nominal_hz), total, blocks), BufferReport(tuple(edges)))


def _num(s: str):
    if s == "":
        return None
    try:
        return int(s)
    except ValueError:
        return float(s)


def parse(data: bytes, fmt: str = "json"):
    """Inverse of :func:`export`; returns a :class:`Profile` or :class:`ComparisonReport`."""
    text = data.decode() if isinstance(data, (bytes, bytearray)) else str(data)
    if fmt == "json":
        doc = json.loads(text)
        if doc.get("schema_version") != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema_version {doc.get('schema_version')!r}")
        if doc.get("kind") == "comparison":
            rows = tuple(Delta(r["key"], r["metric"], r["a"], r["b"]) for r in doc["rows"])
            return ComparisonReport(doc["nominal_hz"], rows)
        blocks = [BlockShare(b["name"], b["calls"], b["time_ns"], b["cycles"], b["modeled_ns"], 0.0)
                  for b in doc["blocks"]]
        edges = [EdgeOccupancy(e["name"], e["capacity"], e["item_bytes"], e["high_water"])
                 for e in doc["edges"]]
        return _make_profile(doc["nominal_hz"], blocks, edges)
    if fmt != "csv":
        raise ValueError(f"unknown format {fmt!r}")
    reader = csv.reader(io.StringIO(text))
    header = tuple(next(reader, ()))
    if header == COMPARISON_COLUMNS:
        rows = tuple(Delta(r[0], r[1], _num(r[2]), _num(r[3])) for r in reader)
        return ComparisonReport(0.0, rows)
    if header != PROFILE_COLUMNS:
        raise ValueError("unrecognised CSV header")
    blocks, edges = [], []
    for r in reader:
        if r[0] == "block":
            blocks.append(BlockShare(r[1], int(r[2]), int(r[3]), int(r[4]), int(r[5]), 0.0))
        elif r[0] == "edge":
            edges.append(EdgeOccupancy(r[1], int(r[6]), int(r[7]), int(r[8])))
        else:
            raise ValueError(f"unknown row kind {r[0]!r}")
    return _make_profile(0.0, blocks, edges)
