"""On-disk formats: IQ captures with a JSON sidecar, PSDU manifests and event logs.

An IQ file is raw little-endian float32, I then Q for every sample. Its
sidecar ``<file>.json`` holds ``sample_rate_hz``, ``center_freq_hz``,
``description`` and any extra keys (the generator's seed, for example).
A manifest has one hex-encoded PSDU per line; an event log has one JSON
object per line.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np


class FormatError(Exception):
    """Unreadable or malformed input file."""


def sidecar_path(path) -> Path:
    return Path(str(path) + ".json")


def write_iq(path, samples, sample_rate: float, center_freq: float = 0.0,
             description: str = "", **extra) -> None:
    x = np.asarray(samples, dtype=np.complex64)
    interleaved = np.empty(2 * len(x), dtype="<f4")
    interleaved[0::2] = x.real
    interleaved[1::2] = x.imag
    Path(path).write_bytes(interleaved.tobytes())
    meta = {"sample_rate_hz": float(sample_rate), "center_freq_hz": float(center_freq),
            "description": description}
    meta.update(extra)
    sidecar_path(path).write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")


def read_iq(path) -> tuple[np.ndarray, dict]:
    """Load a capture; the sidecar is optional."""
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror}") from None
    if len(raw) % 8:
        raise FormatError(f"{path}: {len(raw)} bytes is not a whole number of I/Q pairs")
    f = np.frombuffer(raw, dtype="<f4")
    if not np.all(np.isfinite(f)):
        raise FormatError(f"{path}: non-finite sample values")
    x = (f[0::2] + 1j * f[1::2]).astype(np.complex64)
    meta = {}
    side = sidecar_path(path)
    if side.exists():
        try:
            meta = json.loads(side.read_text())
        except (OSError, ValueError) as exc:
            raise FormatError(f"bad sidecar {side}: {exc}") from None
    return x, meta


def write_manifest(path, psdus) -> None:
    Path(path).write_text("".join(bytes(p).hex() + "\n" for p in psdus))


def read_manifest(path) -> list:
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror}") from None
    out = []
    for i, line in enumerate(lines, 1):
        line = line.strip()
        if not line:
            continue
        try:
            out.append(bytes.fromhex(line))
        except ValueError:
            raise FormatError(f"{path}:{i}: not a hex PSDU") from None
    return out


def write_events(path, events) -> None:
    Path(path).write_text("".join(json.dumps(e.to_dict(), sort_keys=True) + "\n" for e in events))


def read_events(path) -> list:
    """Event dicts from a JSON-lines log."""
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror}") from None
    out = []
    for i, line in enumerate(lines, 1):
        if not line.strip():
            continue
        try:
            d = json.loads(line)
            d["psdu"] = bytes.fromhex(d["psdu"])
            d["fcs_ok"] = bool(d["fcs_ok"])
        except (ValueError, KeyError, TypeError):
            raise FormatError(f"{path}:{i}: malformed event") from None
        out.append(d)
    return out
