"""Binary snapshot files.

Layout, all little-endian::

    magic      4 bytes  b"MHDS"
    version    uint32   1
    d          uint32
    n          uint32
    time       float64
    count      uint32   number of scalar fields
    payload    count × n^d float64, physical values, row-major, fields in order

An MHD state is stored as the d components of u followed by those of b.
"""

from __future__ import annotations

import os
import struct
from dataclasses import dataclass

import numpy as np

from .solver import MHDState
from .spectral import SpectralField, VectorField, make_grid

__all__ = [
    "MAGIC",
    "VERSION",
    "SnapshotError",
    "SnapshotFile",
    "encode_snapshot",
    "decode_snapshot",
    "write_snapshot",
    "read_snapshot",
    "state_snapshot",
]

MAGIC = b"MHDS"
VERSION = 1
HEADER = struct.Struct("<4sIIIdI")
_LE_F64 = np.dtype("<f8")


class SnapshotError(ValueError):
    pass


@dataclass
class SnapshotFile:
    d: int
    n: int
    time: float
    fields: np.ndarray  # (count, n, ..., n) float64

    @property
    def count(self) -> int:
        return int(self.fields.shape[0])

    def grid(self):
        return make_grid(self.d, self.n)

    def to_state(self) -> MHDState:
        if self.count != 2 * self.d:
            raise SnapshotError(f"an MHD state needs {2 * self.d} fields, file has {self.count}")
        g = self.grid()
        u = VectorField.from_values(g, self.fields[: self.d]).certify()
        b = VectorField.from_values(g, self.fields[self.d:]).certify()
        return MHDState(u, b, self.time)

    def named_fields(self) -> list[tuple[str, object]]:
        """(name, field) pairs: u and b for a state, f0, f1, … otherwise."""
        g = self.grid()
        if self.count == 2 * self.d:
            st = self.to_state()
            return [("u", st.u), ("b", st.b)]
        return [(f"f{i}", SpectralField.from_values(g, self.fields[i])) for i in range(self.count)]


def state_snapshot(state: MHDState) -> SnapshotFile:
    g = state.grid
    return SnapshotFile(g.d, g.n, float(state.t), np.concatenate([state.u.values, state.b.values]))


def encode_snapshot(snap: SnapshotFile) -> bytes:
    shape = (snap.n,) * snap.d
    fields = np.asarray(snap.fields, dtype=np.float64)
    if fields.shape[1:] != shape:
        raise SnapshotError(f"field shape {fields.shape[1:]} does not match d={snap.d}, n={snap.n}")
    head = HEADER.pack(MAGIC, VERSION, snap.d, snap.n, float(snap.time), fields.shape[0])
    return head + np.ascontiguousarray(fields, dtype=_LE_F64).tobytes(order="C")


def decode_snapshot(data: bytes) -> SnapshotFile:
    if len(data) < HEADER.size:
        raise SnapshotError("file shorter than the snapshot header")
    magic, version, d, n, t, count = HEADER.unpack_from(data)
    if magic != MAGIC:
        raise SnapshotError(f"bad magic {magic!r}")
    if version != VERSION:
        raise SnapshotError(f"unsupported snapshot version {version}")
    expected = count * n**d * 8
    payload = data[HEADER.size:]
    if len(payload) != expected:
        raise SnapshotError(f"payload is {len(payload)} bytes, header implies {expected}")
    fields = np.frombuffer(payload, dtype=_LE_F64).astype(np.float64).reshape((count,) + (n,) * d)
    return SnapshotFile(d, n, t, fields)


def write_snapshot(path: str | os.PathLike, snap: SnapshotFile | MHDState) -> str:
    if isinstance(snap, MHDState):
        snap = state_snapshot(snap)
    with open(path, "wb") as fh:
        fh.write(encode_snapshot(snap))
    return str(path)


def read_snapshot(path: str | os.PathLike) -> SnapshotFile:
    with open(path, "rb") as fh:
        return decode_snapshot(fh.read())
