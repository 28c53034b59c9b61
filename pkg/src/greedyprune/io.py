"""On-disk formats: binary token files and text selection records.

Token file layout (all integers little-endian)::

    offset  size  field
    0       4     magic b"TOKD"
    4       4     format version, u32 (= 1)
    8       4     n_tokens, u32
    12      4     dim, u32
    16      1     has_query, u8 (0 or 1)
    17      3     zero padding
    20      4*n*d token matrix, float32, row-major
    ...     4*d   query vector, float32 (only when has_query = 1)

Selection records are JSON objects written one field per line in a fixed
key order, so identical records serialise to identical bytes.
"""
from __future__ import annotations

import json
import re
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

import numpy as np

from . import _backend
from .errors import (
    BadMagic,
    FormatError,
    NonFiniteValue,
    RecordParseError,
    TruncatedFile,
    UnsupportedVersion,
)

MAGIC = b"TOKD"
VERSION = 1
_HEADER = struct.Struct("<4sIIIB3s")
HEADER_SIZE = _HEADER.size


def fnv1a64(data: bytes) -> int:
    return _backend.kernels.fnv1a64(data)


def checksum_hex(data: bytes) -> str:
    """FNV-1a 64-bit digest as 16 lowercase hex digits."""
    return f"{fnv1a64(data):016x}"


def encode_token_file(tokens, query=None) -> bytes:
    x = np.asarray(tokens, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] < 1:
        raise ValueError(f"token matrix must be 2-D with at least one column, got shape {x.shape}")
    n, d = x.shape
    x32 = x.astype("<f4")
    _check_finite(x32)
    parts = [_HEADER.pack(MAGIC, VERSION, n, d, 0 if query is None else 1, b"\0\0\0"), x32.tobytes()]
    if query is not None:
        q32 = np.asarray(query, dtype=np.float64).astype("<f4")
        if q32.shape != (d,):
            raise ValueError(f"query has shape {q32.shape}, expected ({d},)")
        _check_finite(q32.reshape(1, d), query_row=True)
        parts.append(q32.tobytes())
    return b"".join(parts)


def _check_finite(a, query_row=False):
    bad = np.argwhere(~np.isfinite(a))
    if bad.size:
        r, c = (int(v) for v in bad[0])
        raise NonFiniteValue("query" if query_row else r, c)


def decode_token_file(data: bytes):
    """Parse token-file bytes into ``(tokens, query)`` as float64 arrays."""
    if len(data) < HEADER_SIZE:
        raise TruncatedFile(HEADER_SIZE, len(data))
    magic, version, n, d, has_query, pad = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise BadMagic(f"bad magic {magic!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise UnsupportedVersion(f"format version {version} is not supported (expected {VERSION})")
    if has_query not in (0, 1) or pad != b"\0\0\0":
        raise FormatError("malformed header flags or padding")
    if d < 1:
        raise FormatError("dim must be at least 1")
    expected = HEADER_SIZE + 4 * d * (n + has_query)
    if len(data) < expected:
        raise TruncatedFile(expected, len(data))
    if len(data) > expected:
        raise FormatError(f"{len(data) - expected} trailing bytes after declared payload")
    body = np.frombuffer(data, dtype="<f4", count=n * d, offset=HEADER_SIZE).reshape(n, d)
    _check_finite(body)
    query = None
    if has_query:
        q = np.frombuffer(data, dtype="<f4", count=d, offset=HEADER_SIZE + 4 * n * d)
        _check_finite(q.reshape(1, d), query_row=True)
        query = q.astype(np.float64)
    return body.astype(np.float64), query


def write_token_file(path, tokens, query=None) -> None:
    Path(path).write_bytes(encode_token_file(tokens, query))


def read_token_file(path):
    """Return ``(tokens, query)``; ``query`` is None when the file has none."""
    return decode_token_file(Path(path).read_bytes())


def read_saliency_file(path) -> np.ndarray:
    """Whitespace-separated floats, one weight per token (externally computed saliency)."""
    words = Path(path).read_text(encoding="utf-8").split()
    try:
        w = np.array([float(v) for v in words], dtype=np.float64)
    except ValueError as exc:
        raise FormatError(f"{path}: {exc}") from exc
    if not np.isfinite(w).all():
        raise FormatError(f"{path}: saliency values must be finite")
    return w


# -- selection records -----------------------------------------------------

_FIELDS = (
    "method",
    "budget",
    "tau",
    "indices",
    "backfilled",
    "backfilled_indices",
    "objective",
    "feasibility_violation_count",
    "runtime_microseconds",
    "input_checksum",
)
_REQUIRED = tuple(f for f in _FIELDS if f != "backfilled_indices")
_HEX16 = re.compile(r"[0-9a-f]{16}")


@dataclass
class SelectionRecord:
    method: str
    budget: int
    tau: Optional[float]
    indices: list[int]
    backfilled: int
    objective: float
    feasibility_violation_count: int
    runtime_microseconds: int
    input_checksum: str
    backfilled_indices: list[int] = field(default_factory=list)
    extra: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        self.indices = sorted(int(i) for i in self.indices)
        self.backfilled_indices = sorted(int(i) for i in self.backfilled_indices)

    def to_dict(self) -> dict:
        out = {name: getattr(self, name) for name in _FIELDS}
        for k, v in self.extra.items():
            out.setdefault(k, v)
        return out


def dumps_selection(rec: SelectionRecord) -> str:
    items = rec.to_dict().items()
    body = ",\n".join(f"  {json.dumps(k)}: {json.dumps(v, allow_nan=False)}" for k, v in items)
    return "{\n" + body + "\n}\n"


def _line_of(text: str, key: str) -> Optional[int]:
    needle = json.dumps(key) + ":"
    for no, line in enumerate(text.splitlines(), 1):
        if needle in line:
            return no
    return None


def loads_selection(text: str) -> SelectionRecord:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise RecordParseError(exc.msg, line=exc.lineno) from exc
    if not isinstance(raw, dict):
        raise RecordParseError("selection record must be a JSON object", line=1)
    for name in _REQUIRED:
        if name not in raw:
            raise RecordParseError("missing required field", field=name)

    def bad(name, why):
        return RecordParseError(why, line=_line_of(text, name), field=name)

    def want_int(name, value):
        if isinstance(value, bool) or not isinstance(value, int) or value < 0:
            raise bad(name, "expected a non-negative integer")
        return value

    def want_indices(name):
        value = raw.get(name, [])
        if not isinstance(value, list) or not all(
            isinstance(v, int) and not isinstance(v, bool) and v >= 0 for v in value
        ):
            raise bad(name, "expected a list of non-negative integers")
        if any(a >= b for a, b in zip(value, value[1:])):
            raise bad(name, "indices must be strictly ascending")
        return value

    if not isinstance(raw["method"], str):
        raise bad("method", "expected a string")
    tau = raw["tau"]
    if tau is not None and (isinstance(tau, bool) or not isinstance(tau, (int, float))):
        raise bad("tau", "expected a number or null")
    obj = raw["objective"]
    if isinstance(obj, bool) or not isinstance(obj, (int, float)):
        raise bad("objective", "expected a number")
    chk = raw["input_checksum"]
    if not isinstance(chk, str) or not _HEX16.fullmatch(chk):
        raise bad("input_checksum", "expected 16 lowercase hex digits")
    return SelectionRecord(
        method=raw["method"],
        budget=want_int("budget", raw["budget"]),
        tau=None if tau is None else float(tau),
        indices=want_indices("indices"),
        backfilled=want_int("backfilled", raw["backfilled"]),
        objective=float(obj),
        feasibility_violation_count=want_int("feasibility_violation_count", raw["feasibility_violation_count"]),
        runtime_microseconds=want_int("runtime_microseconds", raw["runtime_microseconds"]),
        input_checksum=chk,
        backfilled_indices=want_indices("backfilled_indices"),
        extra={k: v for k, v in raw.items() if k not in _FIELDS},
    )


def write_selection(path, rec: SelectionRecord) -> None:
    Path(path).write_text(dumps_selection(rec), encoding="utf-8")


def read_selection(path) -> SelectionRecord:
    return loads_selection(Path(path).read_text(encoding="utf-8"))


# -- planted-instance sidecar ------------------------------------------------


def planted_sidecar_path(token_path) -> Path:
    p = Path(token_path)
    return p.with_name(p.name + ".planted.json")


def write_planted_metadata(path, inst, seed: int) -> None:
    meta = {
        "seed": seed,
        "cluster_of": [int(c) for c in inst.cluster_of],
        "planted_critical": [int(i) for i in inst.planted_critical],
        "intra_sim_min": inst.intra_sim_min,
        "inter_sim_max": inst.inter_sim_max,
    }
    Path(path).write_text(json.dumps(meta, indent=2) + "\n", encoding="utf-8")


def read_planted_metadata(path) -> dict:
    try:
        meta = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise RecordParseError(exc.msg, line=exc.lineno) from exc
    for key in ("cluster_of", "planted_critical", "intra_sim_min", "inter_sim_max"):
        if key not in meta:
            raise RecordParseError("missing required field", field=key)
    return meta
