"""Binary field snapshots and per-site CSV exports.

A snapshot record is a little-endian header

    magic "YMHK" | version u32 | group tag u8 | rank u8 | N u32 | L f64 | t f64 | k u32

followed by the raw f64 values, sites in lexicographic order with x1 fastest,
then direction indices, then algebra components.  A state file holds two
records: the connection (rank 1) and then the Higgs field (rank 0).
"""

from __future__ import annotations

import csv
import struct

import numpy as np

from ymhk.algebra import GROUP_TAGS, get_group
from ymhk.flow import FlowState
from ymhk.lattice import DIM, LatticeGeom, TensorField, pointwise_norm

__all__ = ["MAGIC", "VERSION", "write_field", "read_field", "save_state", "load_state", "export_site_norms"]

MAGIC = b"YMHK"
VERSION = 1
_HEADER = struct.Struct("<4sIBBIddI")
_TAG_NAMES = {v: k for k, v in GROUP_TAGS.items()}


def _to_storage(values: np.ndarray) -> np.ndarray:
    # internal axes are (x1, x2, x3, x4, ...); storage wants x1 fastest
    return np.ascontiguousarray(np.transpose(values, (3, 2, 1, 0) + tuple(range(4, values.ndim))))


def write_field(fh, field: TensorField, t: float = 0.0, k: int = 0) -> None:
    fh.write(
        _HEADER.pack(
            MAGIC, VERSION, GROUP_TAGS[field.group.tag], field.rank, field.geom.N, field.geom.L, t, k
        )
    )
    fh.write(_to_storage(field.values).astype("<f8").tobytes())


def read_field(fh) -> tuple[TensorField, float, int] | None:
    """Next record from ``fh``, or None at end of file."""
    raw = fh.read(_HEADER.size)
    if not raw:
        return None
    if len(raw) != _HEADER.size:
        raise ValueError("truncated snapshot header")
    magic, version, tag, rank, n, L, t, k = _HEADER.unpack(raw)
    if magic != MAGIC:
        raise ValueError(f"bad magic {magic!r}")
    if version != VERSION:
        raise ValueError(f"unsupported snapshot version {version}")
    group = get_group(_TAG_NAMES[tag])
    geom = LatticeGeom(n, L)
    shape = (n,) * 4 + (DIM,) * rank + (group.dim,)
    count = int(np.prod(shape))
    data = fh.read(8 * count)
    if len(data) != 8 * count:
        raise ValueError("truncated snapshot payload")
    stored = np.frombuffer(data, dtype="<f8").reshape((n,) * 4 + shape[4:])
    values = np.transpose(stored, (3, 2, 1, 0) + tuple(range(4, stored.ndim))).astype(float)
    return TensorField(geom, group, values), t, k


def save_state(path, state: FlowState) -> None:
    with open(path, "wb") as fh:
        write_field(fh, state.A, state.t, state.k)
        write_field(fh, state.u, state.t, state.k)


def load_state(path) -> FlowState:
    with open(path, "rb") as fh:
        first = read_field(fh)
        second = read_field(fh)
    if first is None or second is None:
        raise ValueError(f"{path}: expected a connection record followed by a Higgs record")
    (A, t, k), (u, _, _) = first, second
    return FlowState(t, A, u, k)


def export_site_norms(field: TensorField, path) -> None:
    """CSV of the pointwise norm, one row per site, x1 fastest."""
    norms = pointwise_norm(field)
    n = field.geom.N
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x1", "x2", "x3", "x4", "norm"])
        for i4 in range(n):
            for i3 in range(n):
                for i2 in range(n):
                    for i1 in range(n):
                        w.writerow([i1, i2, i3, i4, repr(float(norms[i1, i2, i3, i4]))])
