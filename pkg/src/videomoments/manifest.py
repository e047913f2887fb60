"""Declarative benchmark manifests (JSON) and their eager validation.

Top-level schema::

    {
      "name": str,
      "kind": "triplet_synthetic" | "triplet_real" | "labeled_knn",
      "pool_size": int,          # optional, triplet_real: enforced pool size
      "entries": [
        {"video_id": str, "feature_path": str, "role": str,
         "triplet_id": str?, "category": str?, "label": str?}
      ]
    }

Relative feature paths resolve against the manifest's own directory. The
same video id may appear in several triplets (in different roles) but must
always map to the same feature file.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ManifestError
from .featureio import MAGIC

KINDS = ("triplet_synthetic", "triplet_real", "labeled_knn")
TRIPLET_ROLES = ("reference", "positive", "negative", "random_negative")
KNN_ROLES = ("gallery", "query")
CATEGORIES = ("Static", "Dyn-App", "Dyn-Obj", "View", "Style")


@dataclass
class ManifestEntry:
    video_id: str
    feature_path: Path
    role: str
    triplet_id: str | None = None
    category: str | None = None
    label: str | None = None


@dataclass
class Triplet:
    triplet_id: str
    category: str | None
    reference: str
    positive: str
    negatives: list[str]
    random_negatives: list[str] = field(default_factory=list)


@dataclass
class BenchmarkManifest:
    name: str
    kind: str
    entries: list[ManifestEntry]
    pool_size: int | None = None
    metadata: dict = field(default_factory=dict)

    def feature_paths(self) -> dict[str, Path]:
        """Unique video_id -> feature_path mapping."""
        paths: dict[str, Path] = {}
        for entry in self.entries:
            paths.setdefault(entry.video_id, entry.feature_path)
        return paths

    def video_ids(self) -> list[str]:
        seen: dict[str, None] = {}
        for entry in self.entries:
            seen.setdefault(entry.video_id, None)
        return list(seen)

    def triplets(self) -> list[Triplet]:
        if self.kind not in ("triplet_synthetic", "triplet_real"):
            raise ManifestError(f"manifest kind {self.kind!r} has no triplets")
        grouped: dict[str, list[ManifestEntry]] = {}
        for entry in self.entries:
            grouped.setdefault(entry.triplet_id, []).append(entry)
        out = []
        for tid in grouped:
            members = grouped[tid]
            refs = [e for e in members if e.role == "reference"]
            poss = [e for e in members if e.role == "positive"]
            negs = [e.video_id for e in members if e.role == "negative"]
            rands = [e.video_id for e in members if e.role == "random_negative"]
            out.append(
                Triplet(
                    triplet_id=tid,
                    category=refs[0].category,
                    reference=refs[0].video_id,
                    positive=poss[0].video_id,
                    negatives=negs,
                    random_negatives=rands,
                )
            )
        return out

    def labels(self) -> dict[str, str]:
        return {e.video_id: e.label for e in self.entries if e.label is not None}


def _check_feature_file(path: Path, video_id: str) -> None:
    if not path.is_file():
        raise ManifestError(f"feature_path for {video_id!r} does not exist: {path}")
    try:
        with open(path, "rb") as fh:
            head = fh.read(4)
    except OSError as exc:
        raise ManifestError(f"feature_path for {video_id!r} is unreadable: {exc}")
    if head != MAGIC:
        raise ManifestError(f"feature_path for {video_id!r} is not an MVFT file: {path}")


def _validate_triplets(manifest: BenchmarkManifest) -> None:
    grouped: dict[str, list[ManifestEntry]] = {}
    for entry in manifest.entries:
        if entry.role not in TRIPLET_ROLES:
            raise ManifestError(
                f"role {entry.role!r} is invalid for kind {manifest.kind!r}"
            )
        if entry.triplet_id is None:
            raise ManifestError(f"entry {entry.video_id!r} is missing triplet_id")
        grouped.setdefault(entry.triplet_id, []).append(entry)
    for tid, members in grouped.items():
        refs = [e for e in members if e.role == "reference"]
        poss = [e for e in members if e.role == "positive"]
        negs = [e for e in members if e.role in ("negative", "random_negative")]
        if len(refs) != 1 or len(poss) != 1 or not negs:
            raise ManifestError(
                f"malformed triplet {tid!r}: needs exactly one reference "
                f"(got {len(refs)}), one positive (got {len(poss)}), and at least "
                f"one negative (got {len(negs)})"
            )
        if manifest.kind == "triplet_synthetic":
            category = refs[0].category
            if category not in CATEGORIES:
                raise ManifestError(
                    f"triplet {tid!r} has category {category!r}; "
                    f"expected one of {CATEGORIES}"
                )


def _validate_labeled(manifest: BenchmarkManifest) -> None:
    for entry in manifest.entries:
        if entry.role not in KNN_ROLES:
            raise ManifestError(
                f"role {entry.role!r} is invalid for kind labeled_knn"
            )
        if not entry.label:
            raise ManifestError(f"entry {entry.video_id!r} is missing its label")


def load_manifest(path: str | Path) -> BenchmarkManifest:
    """Load and eagerly validate a manifest; every invariant is checked here."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ManifestError(f"{path}: invalid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise ManifestError(f"{path}: manifest must be a JSON object")
    for key in ("name", "kind", "entries"):
        if key not in raw:
            raise ManifestError(f"{path}: missing required key {key!r}")
    kind = raw["kind"]
    if kind not in KINDS:
        raise ManifestError(f"{path}: unknown kind {kind!r}; expected one of {KINDS}")
    base = path.parent
    entries: list[ManifestEntry] = []
    path_of: dict[str, Path] = {}
    for i, item in enumerate(raw["entries"]):
        if not isinstance(item, dict):
            raise ManifestError(f"{path}: entry {i} is not an object")
        for key in ("video_id", "feature_path", "role"):
            if key not in item:
                raise ManifestError(f"{path}: entry {i} is missing {key!r}")
        feature_path = Path(item["feature_path"])
        if not feature_path.is_absolute():
            feature_path = base / feature_path
        entry = ManifestEntry(
            video_id=item["video_id"],
            feature_path=feature_path,
            role=item["role"],
            triplet_id=item.get("triplet_id"),
            category=item.get("category"),
            label=item.get("label"),
        )
        prior = path_of.setdefault(entry.video_id, feature_path)
        if prior != feature_path:
            raise ManifestError(
                f"{path}: video {entry.video_id!r} maps to two feature paths"
            )
        entries.append(entry)
    if not entries:
        raise ManifestError(f"{path}: manifest has no entries")
    manifest = BenchmarkManifest(
        name=raw["name"],
        kind=kind,
        entries=entries,
        pool_size=raw.get("pool_size"),
        metadata=raw.get("metadata", {}),
    )
    if kind in ("triplet_synthetic", "triplet_real"):
        _validate_triplets(manifest)
    else:
        _validate_labeled(manifest)
    for vid, feature_path in path_of.items():
        _check_feature_file(feature_path, vid)
    return manifest


def save_manifest(manifest: BenchmarkManifest, path: str | Path) -> None:
    """Write a manifest as JSON with feature paths relative to its directory."""
    path = Path(path)
    base = path.parent.resolve()
    items = []
    for entry in manifest.entries:
        feature_path = entry.feature_path
        try:
            feature_path = feature_path.resolve().relative_to(base)
        except ValueError:
            pass  # outside the manifest directory: keep absolute
        item = {
            "video_id": entry.video_id,
            "feature_path": str(feature_path),
            "role": entry.role,
        }
        if entry.triplet_id is not None:
            item["triplet_id"] = entry.triplet_id
        if entry.category is not None:
            item["category"] = entry.category
        if entry.label is not None:
            item["label"] = entry.label
        items.append(item)
    doc: dict = {"name": manifest.name, "kind": manifest.kind, "entries": items}
    if manifest.pool_size is not None:
        doc["pool_size"] = manifest.pool_size
    if manifest.metadata:
        doc["metadata"] = manifest.metadata
    path.write_text(json.dumps(doc, indent=2) + "\n")
