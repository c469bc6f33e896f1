"""Binary snapshots and grayscale PGM heatmaps.

Snapshot layout (little endian)::

    8 bytes   magic b"FRDFSNAP"
    u32       version (1)
    u32       n
    4 x f64   a1, b1, a2, b2
    f64       time
    n*n f64   nodal values, row-major over [j1, j2]
"""
from __future__ import annotations

import struct

import numpy as np

from .errors import ConfigError, FormatError, IoError
from .spectral import GridSpec, PhysicalField

__all__ = ["emit_snapshot", "load_snapshot", "emit_heatmap", "heatmap_bytes", "SNAPSHOT_MAGIC", "HEADER_SIZE"]

SNAPSHOT_MAGIC = b"FRDFSNAP"
SNAPSHOT_VERSION = 1
_HEADER = struct.Struct("<8sII4dd")
HEADER_SIZE = _HEADER.size  # 56


def _write(path, data):
    try:
        with open(path, "wb") as fh:
            fh.write(data)
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def snapshot_bytes(field, t):
    g = field.grid
    header = _HEADER.pack(SNAPSHOT_MAGIC, SNAPSHOT_VERSION, g.n, *g.x1_range, *g.x2_range, float(t))
    return header + np.ascontiguousarray(field.values, dtype="<f8").tobytes()


def emit_snapshot(field, path, t=0.0):
    """Write one field component to ``path``."""
    _write(path, snapshot_bytes(field, t))


def load_snapshot(path):
    """Read a snapshot; returns ``(PhysicalField, time)``."""
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    if len(data) < HEADER_SIZE:
        raise FormatError(f"{path}: truncated header ({len(data)} bytes)")
    magic, version, n, a1, b1, a2, b2, t = _HEADER.unpack_from(data)
    if magic != SNAPSHOT_MAGIC:
        raise FormatError(f"{path}: bad magic {magic!r}")
    if version != SNAPSHOT_VERSION:
        raise FormatError(f"{path}: unsupported version {version}")
    expected = HEADER_SIZE + 8 * n * n
    if len(data) != expected:
        raise FormatError(f"{path}: expected {expected} bytes, found {len(data)}")
    values = np.frombuffer(data, dtype="<f8", offset=HEADER_SIZE).reshape(n, n).astype(float)
    try:
        grid = GridSpec(n, (a1, b1), (a2, b2))
    except ValueError as exc:
        raise FormatError(f"{path}: invalid grid in header: {exc}") from exc
    return PhysicalField(grid, values), t


def heatmap_bytes(field, value_range=None, crop=None, invert=False):
    """Encode a field as binary PGM (P5).

    Image rows run from the largest x2 down; columns follow x1. ``crop`` is an
    ``(x1_lo, x1_hi, x2_lo, x2_hi)`` box of half-open intervals selecting nodes.
    """
    values = field.values
    if not np.isfinite(values).all():
        raise ConfigError("cannot render non-finite values")
    if crop is not None:
        x1, x2 = field.grid.axes
        m1 = (x1 >= crop[0]) & (x1 < crop[1])
        m2 = (x2 >= crop[2]) & (x2 < crop[3])
        values = values[np.ix_(m1, m2)]
        if values.size == 0:
            raise ConfigError(f"crop {crop} selects no nodes")
    lo, hi = (float(values.min()), float(values.max())) if value_range is None else map(float, value_range)
    if hi > lo:
        scaled = np.rint(255.0 * (np.clip(values, lo, hi) - lo) / (hi - lo))
    else:
        scaled = np.full(values.shape, 128.0)
    pixels = scaled.astype(np.uint8)
    if invert:
        pixels = 255 - pixels
    image = pixels.T[::-1, :]
    height, width = image.shape
    return f"P5\n{width} {height}\n255\n".encode("ascii") + image.tobytes()


def emit_heatmap(field, path, value_range=None, crop=None, invert=False):
    """Write :func:`heatmap_bytes` to ``path``."""
    _write(path, heatmap_bytes(field, value_range, crop, invert))
