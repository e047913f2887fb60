"""kNN voting rules, tie determinism, and report accounting."""

import numpy as np
import pytest

from videomoments import (
    ContractError,
    LabeledSet,
    ManifestError,
    MomentEmbedding,
    build_index,
    eval_knn,
    knn,
    majority_vote,
    weighted_vote,
)


def index_from(vectors, prefix="v"):
    embs = [
        MomentEmbedding(
            video_id=f"{prefix}{i}",
            vector=np.asarray(v, dtype=np.float64),
            config_digest="d",
        )
        for i, v in enumerate(vectors)
    ]
    return build_index(embs)


class TestKnn:
    def test_exact_duplicate_is_top(self, rng):
        vs = rng.normal(size=(5, 6))
        vs[3] = vs[0]
        index = index_from(vs)
        neighbors, truncated = knn(index, "v0", 1, [f"v{i}" for i in range(1, 5)])
        assert neighbors[0][0] == "v3"
        assert neighbors[0][1] == pytest.approx(1.0, abs=1e-12)
        assert not truncated

    def test_short_gallery_sets_warning(self, rng):
        index = index_from(rng.normal(size=(4, 5)))
        neighbors, truncated = knn(index, "v0", 10, ["v1", "v2", "v3"])
        assert len(neighbors) == 3
        assert truncated

    def test_empty_gallery(self, rng):
        index = index_from(rng.normal(size=(2, 3)))
        with pytest.raises(ContractError, match="empty gallery"):
            knn(index, "v0", 3, ["v0"])  # query excluded -> empty

    def test_matches_brute_force_oracle(self, rng):
        vs = rng.normal(size=(40, 8))
        index = index_from(vs)
        gallery = [f"v{i}" for i in range(1, 40)]
        neighbors, _ = knn(index, "v0", 20, gallery)
        scores = index.matrix @ index.matrix[0]
        oracle = sorted(range(1, 40), key=lambda i: (-scores[i], i))[:20]
        assert [vid for vid, _ in neighbors] == [f"v{i}" for i in oracle]


class TestMajorityVote:
    def test_plain_majority(self):
        labels = {"a": "A", "b": "A", "c": "B"}
        assert majority_vote([("a", 0.9), ("b", 0.8), ("c", 0.99)], labels) == "A"

    def test_count_tie_breaks_by_similarity(self):
        labels = {"a": "A", "b": "B"}
        assert majority_vote([("a", 0.9), ("b", 0.5)], labels) == "A"
        assert majority_vote([("a", 0.5), ("b", 0.9)], labels) == "B"

    def test_full_tie_breaks_lexicographically(self):
        labels = {"a": "B", "b": "A"}
        assert majority_vote([("a", 0.7), ("b", 0.7)], labels) == "A"

    def test_matches_counting_oracle(self, rng):
        classes = ["A", "B", "C"]
        for _ in range(50):
            n = int(rng.integers(1, 21))
            neighbors = [(f"n{i}", float(rng.uniform(-1, 1))) for i in range(n)]
            labels = {f"n{i}": classes[int(rng.integers(0, 3))] for i in range(n)}
            counts = {}
            sums = {}
            for vid, s in neighbors:
                counts[labels[vid]] = counts.get(labels[vid], 0) + 1
                sums[labels[vid]] = sums.get(labels[vid], 0.0) + s
            best = sorted(counts, key=lambda c: (-counts[c], -sums[c], c))[0]
            assert majority_vote(neighbors, labels) == best

    def test_missing_label(self):
        with pytest.raises(ContractError, match="missing label"):
            majority_vote([("ghost", 0.5)], {})

    def test_empty_neighbors(self):
        with pytest.raises(ContractError):
            majority_vote([], {})


class TestWeightedVote:
    def test_arithmetic_example(self):
        labels = {"a": "A", "b": "B", "c": "B"}
        ranked = weighted_vote([("a", 0.9), ("b", 0.8), ("c", 0.7)], labels)
        assert ranked == [("B", 1.5), ("A", 0.9)]
        ranked = weighted_vote([("a", 0.9), ("b", 0.4), ("c", 0.4)], labels)
        assert ranked[0] == ("A", 0.9)
        assert ranked[1] == ("B", pytest.approx(0.8))

    def test_single_neighbor(self):
        assert weighted_vote([("a", 0.42)], {"a": "X"}) == [("X", 0.42)]

    def test_equal_similarities_match_majority(self, rng):
        classes = ["A", "B", "C"]
        for _ in range(30):
            n = int(rng.integers(1, 15))
            neighbors = [(f"n{i}", 1.0) for i in range(n)]
            labels = {f"n{i}": classes[int(rng.integers(0, 3))] for i in range(n)}
            top = weighted_vote(neighbors, labels)[0][0]
            assert top == majority_vote(neighbors, labels)

    def test_negative_similarity_clamped(self):
        labels = {"a": "A", "b": "B"}
        ranked = weighted_vote([("a", 0.2), ("b", -0.9)], labels)
        assert ranked == [("A", 0.2), ("B", 0.0)]
        raw = weighted_vote([("a", 0.2), ("b", -0.9)], labels, clamp_negative=False)
        assert raw == [("A", 0.2), ("B", -0.9)]

    def test_score_tie_lexicographic(self):
        labels = {"a": "B", "b": "A"}
        ranked = weighted_vote([("a", 0.5), ("b", 0.5)], labels)
        assert [label for label, _ in ranked] == ["A", "B"]


class TestEvalKnn:
    def test_duplicate_gallery_perfect(self, rng):
        queries = rng.normal(size=(6, 8))
        vectors = np.concatenate([queries, queries])  # v0..v5 queries, v6..v11 copies
        index = index_from(vectors)
        labels = {}
        for i in range(6):
            labels[f"v{i}"] = f"c{i % 3}"
            labels[f"v{i + 6}"] = f"c{i % 3}"
        labeled = LabeledSet(
            labels=labels,
            gallery_ids=[f"v{i}" for i in range(6, 12)],
            query_ids=[f"v{i}" for i in range(6)],
        )
        report = eval_knn(index, labeled, k=1)
        assert report.acc1_majority == 1.0
        assert report.acc1_weighted == 1.0
        assert report.acc5_weighted == 1.0

    def test_acc5_at_least_acc1(self, rng):
        vectors = rng.normal(size=(40, 6))
        index = index_from(vectors)
        labels = {f"v{i}": f"c{i % 7}" for i in range(40)}
        labeled = LabeledSet(
            labels=labels,
            gallery_ids=[f"v{i}" for i in range(20)],
            query_ids=[f"v{i}" for i in range(20, 40)],
        )
        report = eval_knn(index, labeled, k=10)
        assert report.acc5_weighted >= report.acc1_weighted
        assert 0.0 <= report.acc1_majority <= 1.0

    def test_determinism(self, rng):
        vectors = rng.normal(size=(30, 5))
        index = index_from(vectors)
        labels = {f"v{i}": f"c{i % 3}" for i in range(30)}
        labeled = LabeledSet(
            labels=labels,
            gallery_ids=[f"v{i}" for i in range(15)],
            query_ids=[f"v{i}" for i in range(15, 30)],
        )
        a = eval_knn(index, labeled, k=7)
        b = eval_knn(index, labeled, k=7)
        assert a.acc1_majority == b.acc1_majority
        assert [r.majority_label for r in a.records] == [r.majority_label for r in b.records]
        assert [r.neighbors for r in a.records] == [r.neighbors for r in b.records]

    def test_unknown_id_in_labeled_set(self, rng):
        index = index_from(rng.normal(size=(3, 4)))
        labeled = LabeledSet(
            labels={"v0": "a", "v1": "a", "ghost": "b"},
            gallery_ids=["v0", "v1"],
            query_ids=["ghost"],
        )
        with pytest.raises(ContractError, match="ghost"):
            eval_knn(index, labeled, k=1)


class TestLabeledSetCsv:
    def test_loads(self, tmp_path):
        csv_path = tmp_path / "labels.csv"
        csv_path.write_text(
            "video_id,label,split\nv0,cat,gallery\nv1,dog,gallery\nv2,cat,query\n"
        )
        labeled = LabeledSet.from_csv(csv_path)
        assert labeled.labels == {"v0": "cat", "v1": "dog", "v2": "cat"}
        assert labeled.gallery_ids == ["v0", "v1"]
        assert labeled.query_ids == ["v2"]

    def test_missing_header(self, tmp_path):
        csv_path = tmp_path / "bad.csv"
        csv_path.write_text("id,cls\nv0,cat\n")
        with pytest.raises(ManifestError, match="header"):
            LabeledSet.from_csv(csv_path)

    def test_unknown_split(self, tmp_path):
        csv_path = tmp_path / "bad.csv"
        csv_path.write_text("video_id,label,split\nv0,cat,test\n")
        with pytest.raises(ManifestError, match="split"):
            LabeledSet.from_csv(csv_path)

    def test_empty_label_rejected(self, tmp_path):
        csv_path = tmp_path / "bad.csv"
        csv_path.write_text("video_id,label,split\nv0,,gallery\n")
        with pytest.raises(ContractError, match="label"):
            LabeledSet.from_csv(csv_path)
