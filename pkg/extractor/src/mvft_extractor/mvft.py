"""Writer for the MVFT feature-file format (the boundary with the engine).

Layout, little-endian: magic ``MVFT``, u32 version (1), u32 T, u32 P,
u32 d, u32 id byte length, UTF-8 video id, then T*P*d float32 values in
[t][p][dim] row-major order. No padding, no trailer.

The extractor deliberately does not import the engine package; this file
format is the whole contract between the two.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

MAGIC = b"MVFT"
VERSION = 1


def _u32(value: int) -> bytes:
    return int(value).to_bytes(4, "little")


def write_mvft(video_id: str, features: np.ndarray, path: str | Path) -> int:
    """Write a (T, P, d) float array; returns the byte count."""
    arr = np.ascontiguousarray(features, dtype="<f4")
    if arr.ndim != 3 or min(arr.shape) < 1:
        raise ValueError(f"features must be a nonempty (T, P, d) array, got {arr.shape}")
    if not np.isfinite(arr).all():
        raise ValueError(f"features for {video_id!r} contain non-finite values")
    T, P, d = arr.shape
    id_bytes = video_id.encode("utf-8")
    blob = (
        MAGIC + _u32(VERSION) + _u32(T) + _u32(P) + _u32(d)
        + _u32(len(id_bytes)) + id_bytes + arr.tobytes()
    )
    Path(path).write_bytes(blob)
    return len(blob)


def read_mvft_header(path: str | Path) -> dict:
    """Parse just the header (for tests and info output)."""
    raw = Path(path).read_bytes()
    if raw[:4] != MAGIC:
        raise ValueError(f"{path}: not an MVFT file")
    T = int.from_bytes(raw[8:12], "little")
    P = int.from_bytes(raw[12:16], "little")
    d = int.from_bytes(raw[16:20], "little")
    id_len = int.from_bytes(raw[20:24], "little")
    video_id = raw[24 : 24 + id_len].decode("utf-8")
    return {"video_id": video_id, "T": T, "P": P, "d": d}
