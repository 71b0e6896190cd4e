"""On-disk formats: the time-series CSV, binary checkpoints, JSON reports."""

from __future__ import annotations

import csv
import json
import struct
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .diagnostics import SERIES_COLUMNS, TimeSeriesRecord
from .model import SimState
from .spectral import make_grid

CHECKPOINT_MAGIC = b"ECNVCKPT"
CHECKPOINT_VERSION = 1
_HEADER = struct.Struct("<8sIIdd")  # magic, version, n, L, t


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def emit_series(records: Iterable[TimeSeriesRecord], path: str | Path) -> Path:
    """Write records as CSV with 17 significant digits per value."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    rows = [r.row() for r in records]
    ts = [r[0] for r in rows]
    if any(b < a for a, b in zip(ts, ts[1:])):
        raise ValueError("records must be time-ordered")
    with open(path, "w", newline="") as fh:
        fh.write(",".join(SERIES_COLUMNS) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")
    return path


def read_series(path: str | Path) -> dict[str, np.ndarray]:
    """Read a series CSV into column arrays."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        data = [[float(v) for v in row] for row in reader if row]
    if tuple(header) != SERIES_COLUMNS:
        raise ValueError(f"unexpected CSV header in {path}")
    arr = np.array(data, float).reshape(-1, len(header))
    return {name: arr[:, j] for j, name in enumerate(header)}


def read_records(path: str | Path) -> list[TimeSeriesRecord]:
    cols = read_series(path)
    n = len(cols["t"])
    return [TimeSeriesRecord.from_row([cols[c][i] for c in SERIES_COLUMNS]) for i in range(n)]


def write_checkpoint(state: SimState, path: str | Path) -> Path:
    """Header then little-endian complex128 coefficients of q, u1, u2."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    grid = state.grid
    header = _HEADER.pack(CHECKPOINT_MAGIC, CHECKPOINT_VERSION, grid.n, grid.half_period, state.t)
    body = np.concatenate([state.q_hat[None], state.u_hat]).astype("<c16", copy=False)
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(body).tobytes())
    tmp.replace(path)
    return path


def read_checkpoint(path: str | Path) -> SimState:
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise ValueError(f"{path}: truncated checkpoint header")
    magic, version, n, L, t = _HEADER.unpack_from(raw)
    if magic != CHECKPOINT_MAGIC:
        raise ValueError(f"{path}: not a checkpoint file")
    if version != CHECKPOINT_VERSION:
        raise ValueError(f"{path}: unsupported checkpoint version {version}")
    body = np.frombuffer(raw, dtype="<c16", offset=_HEADER.size)
    if body.size != 3 * n * n:
        raise ValueError(f"{path}: expected {3 * n * n} coefficients, found {body.size}")
    fields = body.reshape(3, n, n).astype(complex)
    return SimState(make_grid(n, L), t, fields[0].copy(), fields[1:].copy())


def write_json(obj, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=2, sort_keys=True, default=_jsonable) + "\n")
    return path


def read_json(path: str | Path):
    return json.loads(Path(path).read_text())


def _jsonable(x):
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, np.ndarray):
        return x.tolist()
    raise TypeError(f"cannot serialize {type(x).__name__}")


def write_rows(path: str | Path, header: Sequence[str], rows: Iterable[Sequence[float]]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")
    return path
