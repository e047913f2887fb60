"""kNN classification over an embedding index: majority and weighted votes.

Ties are deterministic: a count tie falls back to the higher summed
similarity, then to the lexicographically smaller label. Negative
similarities are clamped to zero in weighted voting by default so a
dissimilar neighbor cannot subtract evidence (flag-controlled).
"""

from __future__ import annotations

import csv
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

from .errors import ContractError, ManifestError
from .retrieval import EmbeddingIndex, rank

DEFAULT_K = 20
SPLITS = ("gallery", "query")


@dataclass
class LabeledSet:
    """Video ids with class labels, partitioned into gallery and query splits."""

    labels: dict[str, str]
    gallery_ids: list[str]
    query_ids: list[str]

    def __post_init__(self):
        for vid in list(self.gallery_ids) + list(self.query_ids):
            if not self.labels.get(vid):
                raise ContractError(f"missing or empty label for {vid!r}")

    def validate_against(self, index: EmbeddingIndex) -> None:
        for vid in self.gallery_ids + self.query_ids:
            if vid not in index:
                raise ContractError(f"labeled id {vid!r} is not in the index")

    @classmethod
    def from_csv(cls, path: str | Path) -> "LabeledSet":
        """Load from CSV with header ``video_id,label,split``."""
        labels: dict[str, str] = {}
        gallery: list[str] = []
        query: list[str] = []
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            required = {"video_id", "label", "split"}
            if reader.fieldnames is None or not required.issubset(reader.fieldnames):
                raise ManifestError(
                    f"{path}: expected CSV header video_id,label,split, "
                    f"got {reader.fieldnames}"
                )
            for row in reader:
                vid, label, split = row["video_id"], row["label"], row["split"]
                if split not in SPLITS:
                    raise ManifestError(f"{path}: unknown split {split!r} for {vid!r}")
                labels[vid] = label
                (gallery if split == "gallery" else query).append(vid)
        return cls(labels=labels, gallery_ids=gallery, query_ids=query)


@dataclass
class QueryRecord:
    query_id: str
    true_label: str
    neighbors: list[tuple[str, float]]
    majority_label: str
    weighted_labels: list[tuple[str, float]]
    truncated: bool = False


@dataclass
class KnnReport:
    k: int
    acc1_majority: float
    acc1_weighted: float
    acc5_weighted: float
    records: list[QueryRecord] = field(default_factory=list)

    @property
    def n_queries(self) -> int:
        return len(self.records)


def knn(
    index: EmbeddingIndex,
    query_id: str,
    k: int,
    gallery: Sequence[str],
) -> tuple[list[tuple[str, float]], bool]:
    """Top-k gallery neighbors of the query; second value flags a short gallery."""
    if k < 1:
        raise ContractError(f"k must be >= 1, got {k}")
    gallery = [g for g in gallery if g != query_id]
    if not gallery:
        raise ContractError(f"empty gallery for query {query_id!r}")
    ranked = rank(index, query_id, gallery)
    truncated = len(ranked.entries) < k
    return ranked.entries[:k], truncated


def majority_vote(
    neighbors: Sequence[tuple[str, float]],
    labels: Mapping[str, str],
) -> str:
    """Most frequent neighbor label; ties by similarity sum, then lexicographic."""
    if not neighbors:
        raise ContractError("majority_vote requires at least one neighbor")
    counts: dict[str, int] = defaultdict(int)
    sums: dict[str, float] = defaultdict(float)
    for vid, score in neighbors:
        if vid not in labels:
            raise ContractError(f"missing label for neighbor {vid!r}")
        label = labels[vid]
        counts[label] += 1
        sums[label] += score
    return min(counts, key=lambda c: (-counts[c], -sums[c], c))


def weighted_vote(
    neighbors: Sequence[tuple[str, float]],
    labels: Mapping[str, str],
    clamp_negative: bool = True,
) -> list[tuple[str, float]]:
    """Class scores = sum of neighbor similarities per class, descending.

    With clamp_negative (the default) each contribution is max(similarity, 0).
    Score ties order lexicographically by label.
    """
    if not neighbors:
        raise ContractError("weighted_vote requires at least one neighbor")
    scores: dict[str, float] = defaultdict(float)
    for vid, score in neighbors:
        if vid not in labels:
            raise ContractError(f"missing label for neighbor {vid!r}")
        scores[labels[vid]] += max(score, 0.0) if clamp_negative else score
    return sorted(scores.items(), key=lambda item: (-item[1], item[0]))


def eval_knn(
    index: EmbeddingIndex,
    labeled: LabeledSet,
    k: int = DEFAULT_K,
    clamp_negative: bool = True,
) -> KnnReport:
    """Classify every query against the gallery and report the three accuracies."""
    labeled.validate_against(index)
    if not labeled.query_ids:
        raise ContractError("labeled set has no query ids")
    records: list[QueryRecord] = []
    hits_majority = hits_top1 = hits_top5 = 0
    for qid in labeled.query_ids:
        neighbors, truncated = knn(index, qid, k, labeled.gallery_ids)
        maj = majority_vote(neighbors, labeled.labels)
        weighted = weighted_vote(neighbors, labeled.labels, clamp_negative)
        truth = labeled.labels[qid]
        hits_majority += maj == truth
        hits_top1 += weighted[0][0] == truth
        hits_top5 += truth in [label for label, _ in weighted[:5]]
        records.append(
            QueryRecord(
                query_id=qid,
                true_label=truth,
                neighbors=neighbors,
                majority_label=maj,
                weighted_labels=weighted,
                truncated=truncated,
            )
        )
    n = len(records)
    return KnnReport(
        k=k,
        acc1_majority=hits_majority / n,
        acc1_weighted=hits_top1 / n,
        acc5_weighted=hits_top5 / n,
        records=records,
    )
