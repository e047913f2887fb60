"""Binary feature-tensor files (MVFT) and tensor validation.

Layout, little-endian throughout:

    bytes 0-3    magic ``MVFT``
    bytes 4-7    version (u32, currently 1)
    bytes 8-11   T  frame count
    bytes 12-15  P  patches per frame
    bytes 16-19  d  feature dimension
    bytes 20-23  L  byte length of the UTF-8 video id
    next L       video id
    then         T*P*d float32 values in [t][p][dim] row-major order

No padding and no trailer. Payload precision is float32; all statistics
downstream accumulate in float64.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from pathlib import Path
from typing import BinaryIO

import numpy as np

from .errors import (
    BadMagicError,
    InvalidIdError,
    ShapeMismatchError,
    TrailingDataError,
    TruncatedPayloadError,
    UnsupportedVersionError,
    ValidationError,
)

MAGIC = b"MVFT"
VERSION = 1

_U32_MAX = 0xFFFFFFFF
_READ_CHUNK = 1 << 24  # bounded reads so shape lies cannot trigger huge allocations
_MAX_REPORTED_ISSUES = 8


@dataclass
class FeatureTensor:
    """Per-video patch features: a (T, P, d) float32 array plus its id."""

    video_id: str
    data: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=np.float32)
        if arr.ndim != 3:
            raise ValidationError(
                f"feature data must be a (T, P, d) array, got ndim={arr.ndim}"
            )
        if min(arr.shape) < 1:
            raise ValidationError(f"T, P, d must each be >= 1, got shape {arr.shape}")
        if max(arr.shape) > _U32_MAX:
            raise ValidationError(f"shape {arr.shape} exceeds the u32 header range")
        self.data = np.ascontiguousarray(arr)

    @property
    def T(self) -> int:
        return self.data.shape[0]

    @property
    def P(self) -> int:
        return self.data.shape[1]

    @property
    def d(self) -> int:
        return self.data.shape[2]

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.data.shape

    def is_finite(self) -> bool:
        return bool(np.isfinite(self.data).all())

    def __eq__(self, other) -> bool:
        if not isinstance(other, FeatureTensor):
            return NotImplemented
        return (
            self.video_id == other.video_id
            and self.shape == other.shape
            and np.array_equal(
                self.data.view(np.uint32), other.data.view(np.uint32)
            )  # bitwise, so NaN payloads still compare
        )


@dataclass
class TensorDiagnostics:
    """Content report produced by validate(); issues is empty iff all invariants hold."""

    video_id: str
    shape: tuple[int, int, int]
    min: float
    max: float
    mean: float
    finite: bool
    issues: list[str] = field(default_factory=list)


def _u32(value: int) -> bytes:
    return int(value).to_bytes(4, "little")


def _read_exact(source: BinaryIO, n: int, what: str) -> bytes:
    """Read exactly n bytes in bounded chunks; raise TruncatedPayloadError if short."""
    buf = bytearray()
    remaining = n
    while remaining > 0:
        chunk = source.read(min(remaining, _READ_CHUNK))
        if not chunk:
            raise TruncatedPayloadError(
                f"truncated {what}: expected {n} bytes, got {len(buf)}"
            )
        buf.extend(chunk)
        remaining -= len(chunk)
    return bytes(buf)


def write_feature_file(tensor: FeatureTensor, destination: BinaryIO) -> int:
    """Serialize a tensor; returns the byte count written.

    Raises ValidationError (writing nothing) if the tensor contains
    non-finite values.
    """
    if not tensor.is_finite():
        raise ValidationError(
            f"tensor {tensor.video_id!r} contains non-finite values; refusing to write"
        )
    id_bytes = tensor.video_id.encode("utf-8")
    if len(id_bytes) > _U32_MAX:
        raise ValidationError("video_id exceeds the u32 length range")
    T, P, d = tensor.shape
    header = MAGIC + _u32(VERSION) + _u32(T) + _u32(P) + _u32(d) + _u32(len(id_bytes))
    payload = np.ascontiguousarray(tensor.data, dtype="<f4").tobytes()
    destination.write(header)
    destination.write(id_bytes)
    destination.write(payload)
    return len(header) + len(id_bytes) + len(payload)


def read_feature_file(source: BinaryIO) -> FeatureTensor:
    """Parse one MVFT stream into a tensor satisfying all invariants.

    Every malformed stream raises a named FeatureFormatError subclass;
    non-finite payload values raise ValidationError.
    """
    magic = source.read(4)
    if magic != MAGIC:
        raise BadMagicError(f"bad magic: expected {MAGIC!r}, got {magic!r}")
    header = _read_exact(source, 20, "header")
    version = int.from_bytes(header[0:4], "little")
    if version != VERSION:
        raise UnsupportedVersionError(f"unsupported version {version}")
    T = int.from_bytes(header[4:8], "little")
    P = int.from_bytes(header[8:12], "little")
    d = int.from_bytes(header[12:16], "little")
    if min(T, P, d) < 1:
        raise ShapeMismatchError(f"invalid shape T={T} P={P} d={d}: all must be >= 1")
    id_len = int.from_bytes(header[16:20], "little")
    id_raw = _read_exact(source, id_len, "video id") if id_len else b""
    try:
        video_id = id_raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise InvalidIdError(f"video id is not valid UTF-8: {exc}") from None
    payload = _read_exact(source, 4 * T * P * d, "payload")
    trailer = source.read(1)
    if trailer:
        raise TrailingDataError("trailing bytes after payload; format allows none")
    data = np.frombuffer(payload, dtype="<f4").reshape(T, P, d)
    if not np.isfinite(data).all():
        raise ValidationError(f"payload of {video_id!r} contains non-finite values")
    return FeatureTensor(video_id=video_id, data=data.copy())


def read_feature_path(path: str | Path) -> FeatureTensor:
    with open(path, "rb") as fh:
        return read_feature_file(fh)


def write_feature_path(tensor: FeatureTensor, path: str | Path) -> int:
    buf = io.BytesIO()
    n = write_feature_file(tensor, buf)
    Path(path).write_bytes(buf.getvalue())
    return n


def validate(tensor: FeatureTensor) -> TensorDiagnostics:
    """Scan a tensor and report its invariant status without raising."""
    data = tensor.data
    finite_mask = np.isfinite(data)
    finite = bool(finite_mask.all())
    issues: list[str] = []
    if not finite:
        flat = data.ravel()
        bad = np.flatnonzero(~finite_mask.ravel())
        for idx in bad[:_MAX_REPORTED_ISSUES]:
            kind = "NaN" if np.isnan(flat[idx]) else "Inf"
            issues.append(f"non-finite value ({kind}) at flat index {int(idx)}")
        if len(bad) > _MAX_REPORTED_ISSUES:
            issues.append(f"... {len(bad) - _MAX_REPORTED_ISSUES} more non-finite values")
        finite_vals = flat[finite_mask.ravel()]
    else:
        finite_vals = data.ravel()
    if finite_vals.size:
        lo = float(finite_vals.min())
        hi = float(finite_vals.max())
        mean = float(finite_vals.mean(dtype=np.float64))
    else:
        lo = hi = mean = float("nan")
    return TensorDiagnostics(
        video_id=tensor.video_id,
        shape=tensor.shape,
        min=lo,
        max=hi,
        mean=mean,
        finite=finite,
        issues=issues,
    )
