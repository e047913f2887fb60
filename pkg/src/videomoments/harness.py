"""Benchmark orchestration: triplet retrieval, kNN, sweeps, heatmaps.

Embedding of distinct videos is embarrassingly parallel; all aggregation
is an ordered reduction over manifest order, so results are independent of
the thread count. Per-config embeddings are cached by config digest to
avoid recomputation across sweep rows.

Failures (unreadable files, degenerate embeddings) are recorded per video
and count as retrieval failures for the triplets they touch, never skipped,
so reported accuracy is conservative.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .errors import (
    ContractError,
    FeatureFormatError,
    ManifestError,
    ValidationError,
)
from .featureio import read_feature_path
from .knn import DEFAULT_K, KnnReport, LabeledSet, eval_knn
from .manifest import BenchmarkManifest, Triplet
from .moments import MomentConfig, MomentEmbedding, compute_embedding, subsample_frames
from .retrieval import EmbeddingIndex, build_index, rank

_HEATMAP_SYM_TOL = 1e-9
_HEATMAP_DIAG_TOL = 1e-6


def parallel_map(fn: Callable, items: Sequence, threads: int | None = None) -> list:
    """Order-preserving map, optionally across a thread pool."""
    items = list(items)
    if threads == 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


@dataclass
class TripletRecord:
    triplet_id: str
    category: str | None
    query_id: str
    positive_id: str
    pool_size: int
    success: bool
    top_id: str | None = None
    top_score: float | None = None


@dataclass
class TripletReport:
    name: str
    kind: str
    config_label: str
    config_digest: str
    per_category: dict[str, float]
    overall: float
    records: list[TripletRecord]
    failures: dict[str, str]
    pool_description: str

    @property
    def n_triplets(self) -> int:
        return len(self.records)


@dataclass
class SweepRow:
    label: str
    accuracy: float | None
    error: str | None = None
    report: TripletReport | None = None


@dataclass
class FrameSweepRow:
    frames: int
    accuracy: float
    report: TripletReport


@dataclass
class HeatmapMatrix:
    """Full pairwise cosine matrix; symmetric with unit diagonal."""

    ids: list[str]
    matrix: np.ndarray

    def __post_init__(self):
        n = len(self.ids)
        if self.matrix.shape != (n, n):
            raise ValidationError(f"heatmap matrix shape {self.matrix.shape} != ({n}, {n})")
        if float(np.abs(self.matrix - self.matrix.T).max()) > _HEATMAP_SYM_TOL:
            raise ValidationError("heatmap matrix is not symmetric")
        if float(np.abs(np.diag(self.matrix) - 1.0).max()) > _HEATMAP_DIAG_TOL:
            raise ValidationError("heatmap diagonal is not 1")


class EmbeddingCache:
    """In-process cache keyed by (config digest, video id, feature source)."""

    def __init__(self):
        self._store: dict[tuple, MomentEmbedding] = {}

    def get(self, key: tuple) -> MomentEmbedding | None:
        return self._store.get(key)

    def put(self, key: tuple, value: MomentEmbedding) -> None:
        self._store[key] = value


def embed_manifest(
    manifest: BenchmarkManifest,
    config: MomentConfig,
    threads: int | None = None,
    cache: EmbeddingCache | None = None,
    frame_count: int | None = None,
    feature_dir: str | Path | None = None,
) -> tuple[dict[str, MomentEmbedding], dict[str, str]]:
    """Embed every unique video in the manifest.

    Returns (embeddings, failures); a failure is recorded with its message
    instead of aborting the run. A requested frame_count larger than a
    video's frame count is a caller error and raises (use feature_dir to
    point at a higher-frame-rate extraction instead).
    """
    paths = manifest.feature_paths()
    ids = list(paths)
    digest = config.digest

    def job(vid: str):
        key = (digest, vid, str(feature_dir) if feature_dir else None)
        if cache is not None:
            hit = cache.get(key)
            if hit is not None:
                return vid, hit, None
        path = paths[vid]
        if feature_dir is not None:
            path = Path(feature_dir) / path.name
        try:
            tensor = read_feature_path(path)
        except (FeatureFormatError, ValidationError, OSError) as exc:
            return vid, None, f"unreadable features: {exc}"
        if frame_count is not None:
            if frame_count > tensor.T:
                raise ContractError(
                    f"requested {frame_count} frames but video {vid!r} has only "
                    f"{tensor.T}; declare a per-count feature directory"
                )
            tensor = subsample_frames(tensor, frame_count)
        try:
            emb = compute_embedding(tensor, config)
        except (ValidationError, ContractError) as exc:
            return vid, None, str(exc)
        if cache is not None:
            cache.put(key, emb)
        return vid, emb, None

    embeddings: dict[str, MomentEmbedding] = {}
    failures: dict[str, str] = {}
    for vid, emb, error in parallel_map(job, ids, threads):
        if emb is not None:
            embeddings[vid] = emb
        else:
            failures[vid] = error
    return embeddings, failures


def _triplet_pool(
    manifest: BenchmarkManifest,
    triplet: Triplet,
    all_ids: Sequence[str],
) -> list[str]:
    if manifest.kind == "triplet_synthetic":
        return [vid for vid in all_ids if vid != triplet.reference]
    pool = [triplet.positive] + triplet.negatives + triplet.random_negatives
    if manifest.pool_size is not None and len(pool) != manifest.pool_size:
        raise ManifestError(
            f"triplet {triplet.triplet_id!r} declares a pool of {len(pool)} "
            f"candidates but the manifest requires {manifest.pool_size}"
        )
    return pool


def run_triplet_benchmark(
    manifest: BenchmarkManifest,
    config: MomentConfig,
    threads: int | None = None,
    cache: EmbeddingCache | None = None,
    frame_count: int | None = None,
    feature_dir: str | Path | None = None,
) -> TripletReport:
    """Closest-video retrieval over every triplet in the manifest.

    Synthetic kind: the pool is every other video in the manifest.
    Real kind: the pool is the triplet's declared candidates (positive,
    hard negatives, random negatives), size-checked when declared.
    """
    if manifest.kind not in ("triplet_synthetic", "triplet_real"):
        raise ContractError(
            f"triplet benchmark requires a triplet manifest, got {manifest.kind!r}"
        )
    embeddings, failures = embed_manifest(
        manifest, config, threads=threads, cache=cache,
        frame_count=frame_count, feature_dir=feature_dir,
    )
    if not embeddings:
        raise ValidationError("no videos could be embedded")
    index = build_index(list(embeddings.values()))
    all_ids = [vid for vid in manifest.video_ids() if vid in embeddings]

    def evaluate(triplet: Triplet) -> TripletRecord:
        pool = _triplet_pool(manifest, triplet, all_ids)
        if triplet.reference in failures or triplet.positive in failures:
            return TripletRecord(
                triplet_id=triplet.triplet_id,
                category=triplet.category,
                query_id=triplet.reference,
                positive_id=triplet.positive,
                pool_size=len(pool),
                success=False,
            )
        usable_pool = [vid for vid in pool if vid in embeddings]
        ranked = rank(index, triplet.reference, usable_pool)
        if not ranked.entries:
            return TripletRecord(
                triplet_id=triplet.triplet_id,
                category=triplet.category,
                query_id=triplet.reference,
                positive_id=triplet.positive,
                pool_size=0,
                success=False,
            )
        top_id, top_score = ranked.entries[0]
        return TripletRecord(
            triplet_id=triplet.triplet_id,
            category=triplet.category,
            query_id=triplet.reference,
            positive_id=triplet.positive,
            pool_size=len(usable_pool),
            success=top_id == triplet.positive,
            top_id=top_id,
            top_score=top_score,
        )

    triplets = manifest.triplets()
    records = parallel_map(evaluate, triplets, threads)

    by_category: dict[str, list[bool]] = {}
    for record in records:
        if record.category is not None:
            by_category.setdefault(record.category, []).append(record.success)
    per_category = {
        cat: sum(flags) / len(flags) for cat, flags in sorted(by_category.items())
    }
    if manifest.kind == "triplet_synthetic":
        overall = sum(per_category.values()) / len(per_category)
        pool_description = (
            f"per query: positive + all other manifest videos "
            f"({len(all_ids) - 1} candidates)"
        )
    else:
        overall = sum(r.success for r in records) / len(records)
        pool_description = "per query: declared candidate pool" + (
            f" of {manifest.pool_size}" if manifest.pool_size else ""
        )
    return TripletReport(
        name=manifest.name,
        kind=manifest.kind,
        config_label=config.label(),
        config_digest=config.digest,
        per_category=per_category,
        overall=overall,
        records=records,
        failures=failures,
        pool_description=pool_description,
    )


def run_knn_benchmark(
    manifest: BenchmarkManifest,
    config: MomentConfig,
    k: int = DEFAULT_K,
    threads: int | None = None,
    cache: EmbeddingCache | None = None,
    clamp_negative: bool = True,
) -> KnnReport:
    """Embed a labeled manifest, build the index, and run kNN classification."""
    if manifest.kind != "labeled_knn":
        raise ContractError(f"kNN benchmark requires a labeled_knn manifest, got {manifest.kind!r}")
    embeddings, failures = embed_manifest(manifest, config, threads=threads, cache=cache)
    if failures:
        raise ValidationError(
            f"{len(failures)} videos failed to embed: "
            + "; ".join(f"{vid}: {msg}" for vid, msg in sorted(failures.items())[:5])
        )
    index = build_index(list(embeddings.values()))
    labeled = LabeledSet(
        labels=manifest.labels(),
        gallery_ids=[e.video_id for e in manifest.entries if e.role == "gallery"],
        query_ids=[e.video_id for e in manifest.entries if e.role == "query"],
    )
    return eval_knn(index, labeled, k=k, clamp_negative=clamp_negative)


def ablation_sweep(
    manifest: BenchmarkManifest,
    configs: Sequence[MomentConfig],
    threads: int | None = None,
    cache: EmbeddingCache | None = None,
) -> list[SweepRow]:
    """One benchmark run per config; rows sorted by accuracy descending.

    A failing config marks its row and the sweep continues.
    """
    if not configs:
        raise ContractError("ablation sweep requires at least one config")
    cache = cache or EmbeddingCache()
    rows: list[SweepRow] = []
    for config in configs:
        try:
            report = run_triplet_benchmark(manifest, config, threads=threads, cache=cache)
            rows.append(SweepRow(label=config.label(), accuracy=report.overall, report=report))
        except (ValidationError, ContractError, ManifestError) as exc:
            rows.append(SweepRow(label=config.label(), accuracy=None, error=str(exc)))
    rows.sort(key=lambda row: (row.accuracy is None, -(row.accuracy or 0.0), row.label))
    return rows


def frame_count_sweep(
    manifest: BenchmarkManifest,
    config: MomentConfig,
    frame_counts: Sequence[int],
    per_count_dirs: dict[int, str | Path] | None = None,
    threads: int | None = None,
    cache: EmbeddingCache | None = None,
) -> list[FrameSweepRow]:
    """Re-run the triplet benchmark at each temporal sampling density.

    Each count subsamples every tensor to n uniformly spaced frames with the
    pinned index formula. Counts larger than the stored frame count require
    an entry in per_count_dirs pointing at a denser extraction.
    """
    if not frame_counts:
        raise ContractError("frame sweep requires at least one frame count")
    if any(n < 1 for n in frame_counts):
        raise ContractError("frame counts must be >= 1")
    per_count_dirs = per_count_dirs or {}
    cache = cache or EmbeddingCache()
    rows: list[FrameSweepRow] = []
    for n in frame_counts:
        feature_dir = per_count_dirs.get(n)
        report = run_triplet_benchmark(
            manifest,
            config.with_frames(n),
            threads=threads,
            cache=cache,
            frame_count=n,
            feature_dir=feature_dir,
        )
        rows.append(FrameSweepRow(frames=n, accuracy=report.overall, report=report))
    return rows


def similarity_heatmap(embeddings: Sequence[MomentEmbedding]) -> HeatmapMatrix:
    """Full pairwise cosine matrix over embeddings sharing one config digest."""
    if len(embeddings) < 2:
        raise ContractError("heatmap requires at least 2 embeddings")
    index = build_index(list(embeddings))
    return heatmap_from_index(index)


def heatmap_from_index(index: EmbeddingIndex) -> HeatmapMatrix:
    if index.size < 2:
        raise ContractError("heatmap requires at least 2 embeddings")
    sims = index.matrix @ index.matrix.T
    sims = (sims + sims.T) / 2.0  # exact symmetry regardless of BLAS kernel
    return HeatmapMatrix(ids=list(index.ids), matrix=sims)


def group_similarity_means(
    heatmap: HeatmapMatrix,
    group_of: dict[str, str],
) -> tuple[float, float]:
    """Mean within-group vs cross-group similarity over off-diagonal pairs."""
    n = len(heatmap.ids)
    within: list[float] = []
    cross: list[float] = []
    for i in range(n):
        for j in range(i + 1, n):
            a, b = heatmap.ids[i], heatmap.ids[j]
            if a not in group_of or b not in group_of:
                raise ContractError(f"missing group assignment for {a!r} or {b!r}")
            (within if group_of[a] == group_of[b] else cross).append(
                float(heatmap.matrix[i, j])
            )
    if not within or not cross:
        raise ContractError("need both within-group and cross-group pairs")
    return float(np.mean(within)), float(np.mean(cross))
