"""Exact cosine-similarity index over unit-normalized embeddings.

Brute-force only: benchmark pools are at most a few thousand vectors and
metrics must be exactly reproducible. Rows are stored float64; scores are
float64 dot products. Ties break by ascending insertion order.

Index files (MVIX) share the MVFT header style:

    magic ``MVIX`` | version u32 | N u32 | D u32
    digest block   (u32 length + UTF-8)
    id blocks      N x (u32 length + UTF-8)
    matrix         N*D float64, row-major, little-endian
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from pathlib import Path
from typing import BinaryIO, Iterable, Sequence

import numpy as np

from .errors import (
    BadMagicError,
    ContractError,
    InvalidIdError,
    ShapeMismatchError,
    TrailingDataError,
    UnsupportedVersionError,
    ValidationError,
)
from .featureio import _read_exact
from .moments import MomentEmbedding

INDEX_MAGIC = b"MVIX"
INDEX_VERSION = 1

_UNIT_TOL = 1e-6


@dataclass
class EmbeddingIndex:
    """Immutable N x D matrix of unit rows with aligned video ids."""

    ids: list[str]
    matrix: np.ndarray
    config_digest: str

    def __post_init__(self):
        if len(self.ids) != self.matrix.shape[0]:
            raise ValidationError("id count does not match matrix rows")
        self._row_of = {vid: i for i, vid in enumerate(self.ids)}
        if len(self._row_of) != len(self.ids):
            raise ValidationError("duplicate video ids in index")

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]

    def row(self, video_id: str) -> np.ndarray:
        try:
            return self.matrix[self._row_of[video_id]]
        except KeyError:
            raise ContractError(f"unknown video id {video_id!r}") from None

    def position(self, video_id: str) -> int:
        try:
            return self._row_of[video_id]
        except KeyError:
            raise ContractError(f"unknown video id {video_id!r}") from None

    def __contains__(self, video_id: str) -> bool:
        return video_id in self._row_of


@dataclass
class RankedList:
    """Candidates for one query, scores strictly non-increasing."""

    query_id: str
    entries: list[tuple[str, float]]


def build_index(embeddings: Sequence[MomentEmbedding]) -> EmbeddingIndex:
    """Stack embeddings into an index, preserving insertion order.

    All embeddings must share dimension and config digest; ids must be unique.
    Rows are re-normalized defensively so every stored row is unit-norm.
    """
    if not embeddings:
        raise ContractError("cannot build an index from zero embeddings")
    digest = embeddings[0].config_digest
    dim = embeddings[0].vector.shape[0]
    ids: list[str] = []
    seen = set()
    rows = np.empty((len(embeddings), dim), dtype=np.float64)
    for i, emb in enumerate(embeddings):
        if emb.config_digest != digest:
            raise ContractError(
                f"config digest mismatch: {emb.video_id!r} has {emb.config_digest}, "
                f"index has {digest}"
            )
        if emb.vector.shape[0] != dim:
            raise ContractError(
                f"dimension mismatch: {emb.video_id!r} has {emb.vector.shape[0]}, "
                f"index has {dim}"
            )
        if emb.video_id in seen:
            raise ContractError(f"duplicate video id {emb.video_id!r}")
        seen.add(emb.video_id)
        vec = np.asarray(emb.vector, dtype=np.float64)
        norm = float(np.linalg.norm(vec))
        if norm == 0.0:
            raise ValidationError(f"zero-norm embedding for {emb.video_id!r}")
        rows[i] = vec / norm
        ids.append(emb.video_id)
    return EmbeddingIndex(ids=ids, matrix=rows, config_digest=digest)


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    """Dot product of two unit vectors."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ContractError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return float(a @ b)


def rank(
    index: EmbeddingIndex,
    query_id: str,
    pool: Iterable[str] | None = None,
) -> RankedList:
    """All pool members except the query, sorted by cosine score descending.

    Exact ties break by ascending insertion order, so rankings are
    deterministic across runs.
    """
    query_row = index.row(query_id)
    if pool is None:
        positions = [i for i in range(index.size) if index.ids[i] != query_id]
    else:
        positions = []
        seen = set()
        for vid in pool:
            pos = index.position(vid)  # raises on pool member missing
            if vid == query_id or pos in seen:
                continue
            seen.add(pos)
            positions.append(pos)
        positions.sort()
    if not positions:
        return RankedList(query_id=query_id, entries=[])
    candidates = np.array(positions)
    scores = index.matrix[candidates] @ query_row
    order = np.argsort(-scores, kind="stable")
    entries = [(index.ids[candidates[i]], float(scores[i])) for i in order]
    return RankedList(query_id=query_id, entries=entries)


def triplet_success(
    index: EmbeddingIndex,
    query_id: str,
    positive_id: str,
    pool: Iterable[str],
) -> bool:
    """True iff the positive is the closest pool candidate to the query."""
    pool = list(pool)
    if positive_id not in pool:
        raise ContractError(f"positive {positive_id!r} not in candidate pool")
    ranked = rank(index, query_id, pool)
    if not ranked.entries:
        raise ContractError(f"empty candidate pool for query {query_id!r}")
    return ranked.entries[0][0] == positive_id


def _u32(value: int) -> bytes:
    return int(value).to_bytes(4, "little")


def _write_block(sink: BinaryIO, raw: bytes) -> int:
    sink.write(_u32(len(raw)))
    sink.write(raw)
    return 4 + len(raw)


def write_index_file(index: EmbeddingIndex, destination: BinaryIO) -> int:
    written = 0
    destination.write(INDEX_MAGIC + _u32(INDEX_VERSION) + _u32(index.size) + _u32(index.dim))
    written += 12 + 4
    written += _write_block(destination, index.config_digest.encode("utf-8"))
    for vid in index.ids:
        written += _write_block(destination, vid.encode("utf-8"))
    payload = np.ascontiguousarray(index.matrix, dtype="<f8").tobytes()
    destination.write(payload)
    return written + len(payload)


def read_index_file(source: BinaryIO) -> EmbeddingIndex:
    magic = source.read(4)
    if magic != INDEX_MAGIC:
        raise BadMagicError(f"bad index magic: expected {INDEX_MAGIC!r}, got {magic!r}")
    header = _read_exact(source, 12, "index header")
    version = int.from_bytes(header[0:4], "little")
    if version != INDEX_VERSION:
        raise UnsupportedVersionError(f"unsupported index version {version}")
    n = int.from_bytes(header[4:8], "little")
    dim = int.from_bytes(header[8:12], "little")
    if n < 1 or dim < 1:
        raise ShapeMismatchError(f"invalid index shape N={n} D={dim}")

    def read_block(what: str) -> str:
        length = int.from_bytes(_read_exact(source, 4, what + " length"), "little")
        raw = _read_exact(source, length, what) if length else b""
        try:
            return raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise InvalidIdError(f"{what} is not valid UTF-8: {exc}") from None

    digest = read_block("digest")
    ids = [read_block(f"id {i}") for i in range(n)]
    payload = _read_exact(source, 8 * n * dim, "index matrix")
    trailer = source.read(1)
    if trailer:
        raise TrailingDataError("trailing bytes after index matrix")
    matrix = np.frombuffer(payload, dtype="<f8").reshape(n, dim).copy()
    norms = np.linalg.norm(matrix, axis=1)
    if not np.all(np.abs(norms - 1.0) <= _UNIT_TOL):
        raise ValidationError("index rows are not unit-norm")
    return EmbeddingIndex(ids=ids, matrix=matrix, config_digest=digest)


def write_index_path(index: EmbeddingIndex, path: str | Path) -> int:
    buf = io.BytesIO()
    n = write_index_file(index, buf)
    Path(path).write_bytes(buf.getvalue())
    return n


def read_index_path(path: str | Path) -> EmbeddingIndex:
    with open(path, "rb") as fh:
        return read_index_file(fh)
