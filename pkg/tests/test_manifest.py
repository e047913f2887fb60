"""Manifest schema validation and triplet structure checks."""

import json

import numpy as np
import pytest

from videomoments import FeatureTensor, ManifestError, load_manifest, write_feature_path


def write_feature(tmp_path, video_id, T=2, P=1, d=2):
    path = tmp_path / f"{video_id}.mvft"
    data = np.full((T, P, d), 0.5, dtype=np.float32)
    data[0] += 0.25  # non-constant so embeddings are not degenerate
    write_feature_path(FeatureTensor(video_id=video_id, data=data), path)
    return path


def write_manifest(tmp_path, doc, name="manifest.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return path


def triplet_doc(tmp_path, kind="triplet_synthetic", category="Static"):
    for vid in ("r0", "p0", "n0"):
        write_feature(tmp_path, vid)
    return {
        "name": "tiny",
        "kind": kind,
        "entries": [
            {"video_id": "r0", "feature_path": "r0.mvft", "role": "reference",
             "triplet_id": "t0", "category": category},
            {"video_id": "p0", "feature_path": "p0.mvft", "role": "positive",
             "triplet_id": "t0", "category": category},
            {"video_id": "n0", "feature_path": "n0.mvft", "role": "negative",
             "triplet_id": "t0", "category": category},
        ],
    }


class TestLoad:
    def test_minimal_triplet_manifest(self, tmp_path):
        path = write_manifest(tmp_path, triplet_doc(tmp_path))
        manifest = load_manifest(path)
        assert manifest.kind == "triplet_synthetic"
        assert len(manifest.triplets()) == 1
        triplet = manifest.triplets()[0]
        assert triplet.reference == "r0"
        assert triplet.positive == "p0"
        assert triplet.negatives == ["n0"]

    def test_missing_positive_names_triplet(self, tmp_path):
        doc = triplet_doc(tmp_path)
        doc["entries"] = [e for e in doc["entries"] if e["role"] != "positive"]
        path = write_manifest(tmp_path, doc)
        with pytest.raises(ManifestError, match="malformed triplet 't0'"):
            load_manifest(path)

    def test_two_references_rejected(self, tmp_path):
        doc = triplet_doc(tmp_path)
        doc["entries"].append(dict(doc["entries"][0], video_id="p0", feature_path="p0.mvft"))
        path = write_manifest(tmp_path, doc)
        with pytest.raises(ManifestError, match="malformed triplet"):
            load_manifest(path)

    def test_dangling_feature_path(self, tmp_path):
        doc = triplet_doc(tmp_path)
        doc["entries"][0]["feature_path"] = "ghost.mvft"
        path = write_manifest(tmp_path, doc)
        with pytest.raises(ManifestError, match="does not exist"):
            load_manifest(path)

    def test_non_mvft_feature_file(self, tmp_path):
        doc = triplet_doc(tmp_path)
        (tmp_path / "r0.mvft").write_bytes(b"not a feature file")
        path = write_manifest(tmp_path, doc)
        with pytest.raises(ManifestError, match="not an MVFT file"):
            load_manifest(path)

    def test_bad_category(self, tmp_path):
        doc = triplet_doc(tmp_path, category="Blur")
        path = write_manifest(tmp_path, doc)
        with pytest.raises(ManifestError, match="category"):
            load_manifest(path)

    def test_real_kind_allows_free_category(self, tmp_path):
        doc = triplet_doc(tmp_path, kind="triplet_real", category=None)
        for entry in doc["entries"]:
            del entry["category"]
        path = write_manifest(tmp_path, doc)
        manifest = load_manifest(path)
        assert manifest.kind == "triplet_real"

    def test_unknown_kind(self, tmp_path):
        doc = triplet_doc(tmp_path)
        doc["kind"] = "pairwise"
        path = write_manifest(tmp_path, doc)
        with pytest.raises(ManifestError, match="unknown kind"):
            load_manifest(path)

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        with pytest.raises(ManifestError, match="invalid JSON"):
            load_manifest(path)

    def test_conflicting_paths_for_one_id(self, tmp_path):
        doc = triplet_doc(tmp_path)
        write_feature(tmp_path, "other")
        doc["entries"].append(
            {"video_id": "r0", "feature_path": "other.mvft", "role": "negative",
             "triplet_id": "t0", "category": "Static"}
        )
        path = write_manifest(tmp_path, doc)
        with pytest.raises(ManifestError, match="two feature paths"):
            load_manifest(path)

    def test_labeled_requires_labels(self, tmp_path):
        write_feature(tmp_path, "g0")
        doc = {
            "name": "knn",
            "kind": "labeled_knn",
            "entries": [{"video_id": "g0", "feature_path": "g0.mvft", "role": "gallery"}],
        }
        path = write_manifest(tmp_path, doc)
        with pytest.raises(ManifestError, match="label"):
            load_manifest(path)

    def test_pool_size_passthrough(self, tmp_path):
        doc = triplet_doc(tmp_path, kind="triplet_real")
        for entry in doc["entries"]:
            del entry["category"]
        doc["pool_size"] = 2
        path = write_manifest(tmp_path, doc)
        assert load_manifest(path).pool_size == 2


class TestPaperScaleStructure:
    def test_250_triplets_50_per_category(self, tmp_path):
        """25 groups x 10 -> 250 triplets rotating through 5 categories."""
        from videomoments import generate_synthetic

        manifest, _ = generate_synthetic(
            tmp_path, seed=3, groups=25, per_group=10, frames=4, patches=1, dim=4
        )
        triplets = manifest.triplets()
        assert len(triplets) == 250
        assert len(manifest.video_ids()) == 750
        counts = {}
        for t in triplets:
            counts[t.category] = counts.get(t.category, 0) + 1
        assert counts == {
            "Static": 50, "Dyn-App": 50, "Dyn-Obj": 50, "View": 50, "Style": 50,
        }
