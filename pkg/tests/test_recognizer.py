"""
Tests for template storage and matching
"""

import json
import threading
import pytest
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

# Add src to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from imaging import EncodedImage, TilingSpec, encode_image
from recognizer import (
    RecognizerError, TemplateStoreError, TemplateStore, MatchResult, make_provenance, train,
    save_store, load_store, similarity, cosine_similarity, classify,
)

ROW_TILING = TilingSpec((1, 1), (1, 1), 1)


def enc(bits: str) -> EncodedImage:
    """Single-row encoding from a bit string"""
    row = np.array([[int(b) for b in bits]], dtype=np.uint8)
    return EncodedImage(row, row.copy(), ROW_TILING)


def toy_encodings(count: int = 10, seed: int = 0):
    """Two classes of encoded random images"""
    rng = np.random.default_rng(seed)
    tiling = TilingSpec((4, 4), (2, 2), 3)
    examples = []
    for k in range(count):
        label = "s1" if k % 2 == 0 else "s2"
        pixels = rng.random((16, 16))
        if label == "s2":
            pixels[:8] *= 0.2
        examples.append((label, encode_image(pixels, tiling)))
    return examples


class TestSimilarity:
    """Test Hamming and cosine similarity"""

    def test_identical(self):
        """a = b scores 1"""
        assert similarity(enc("1010"), enc("1010")) == 1.0

    def test_complement(self):
        """Complementary encodings score 0"""
        assert similarity(enc("1010"), enc("0101")) == 0.0

    def test_one_bit_apart(self):
        """4 bits, 1 differs"""
        assert similarity(enc("1010"), enc("1011")) == 0.75

    def test_symmetric_and_bounded(self):
        """similarity(a, b) = similarity(b, a) in [0, 1]"""
        rng = np.random.default_rng(1)
        for _ in range(20):
            a, b = rng.integers(0, 2, 16), rng.integers(0, 2, 16)
            assert similarity(a, b) == similarity(b, a)
            assert 0.0 <= similarity(a, b) <= 1.0

    def test_size_mismatch(self):
        """Encodings of different sizes cannot be compared"""
        with pytest.raises(RecognizerError):
            similarity(enc("101"), enc("1010"))

    def test_cosine(self):
        """Cosine of bit vectors; two blanks are identical"""
        assert cosine_similarity([1, 1, 0, 0], [1, 0, 0, 0]) == pytest.approx(1 / np.sqrt(2))
        assert cosine_similarity([0, 0], [0, 0]) == 1.0
        assert cosine_similarity([1, 0], [0, 0]) == 0.0


class TestTrain:
    """Test building template stores"""

    def test_single_template(self):
        """One image, one class"""
        store = train([("a", enc("1100"))])
        assert store.labels == ["a"]
        assert len(store) == 1

    def test_duplicates_kept(self):
        """The same image twice gives two templates"""
        store = train([("a", enc("1100")), ("a", enc("1100"))])
        assert len(store.templates("a")) == 2

    def test_insertion_order(self):
        """Labels keep first-seen order"""
        store = train([("b", enc("1")), ("a", enc("0")), ("b", enc("1"))])
        assert store.labels == ["b", "a"]
        assert "a" in store and "c" not in store

    def test_split_sized_store(self):
        """40 classes with 5 training images each"""
        examples = [(f"s{c}", enc(format(k, "08b"))) for c in range(40) for k in range(5)]
        store = train(examples)
        assert len(store) == 200
        assert len(store.labels) == 40

    def test_empty(self):
        """Training needs at least one example"""
        with pytest.raises(TemplateStoreError):
            train([])

    def test_dims_mismatch(self):
        """Templates share dims"""
        with pytest.raises(TemplateStoreError):
            train([("a", enc("1100")), ("b", enc("110"))])

    def test_tiling_mismatch(self):
        """Templates share the tiling"""
        bits = np.zeros((2, 2), dtype=np.uint8)
        a = EncodedImage(bits, np.zeros((2, 2)), TilingSpec((1, 1), (1, 1), 1))
        b = EncodedImage(bits, np.zeros((1, 1)), TilingSpec((2, 2), (1, 1), 1))
        with pytest.raises(TemplateStoreError):
            train([("a", a), ("b", b)])


class TestClassify:
    """Test nearest-template classification"""

    def test_exact_template(self):
        """A stored template is recognized with score 1"""
        store = train([("a", enc("1100")), ("b", enc("0011"))])
        result = classify(enc("0011"), store)
        assert result.label == "b"
        assert result.score == 1.0

    def test_single_class(self):
        """One class is always predicted"""
        store = train([("only", enc("1111"))])
        assert classify(enc("0000"), store).label == "only"

    def test_nearest_of_three(self):
        """Hamming distances 1, 3 and 4 from the query"""
        store = train([("a", enc("00000000")), ("b", enc("11100001")), ("c", enc("11110001"))])
        result = classify(enc("00000001"), store)
        assert result.label == "a"
        assert result.class_scores == {"a": 0.875, "b": 0.625, "c": 0.5}

    def test_best_template_per_class(self):
        """A class scores its best template"""
        store = train([("a", enc("0000")), ("a", enc("1110")), ("b", enc("1100"))])
        result = classify(enc("1111"), store)
        assert result.class_scores["a"] == 0.75
        assert result.label == "a"

    def test_tie_goes_to_smallest_label(self):
        """Equal scores pick the lexicographically smallest label"""
        store = train([("zeta", enc("1100")), ("alpha", enc("1100"))])
        assert classify(enc("1100"), store).label == "alpha"

    def test_insertion_order_irrelevant(self):
        """Reordering templates does not change the result"""
        examples = [("a", enc("0001")), ("b", enc("0110")), ("c", enc("1011"))]
        forward = classify(enc("0011"), train(examples))
        backward = classify(enc("0011"), train(list(reversed(examples))))
        assert forward == backward

    def test_class_mean(self):
        """Nearest class mean compares with the averaged template"""
        store = train([("a", enc("1100")), ("a", enc("1000")), ("b", enc("0011"))])
        result = classify(enc("1100"), store, match="class_mean")
        assert result.label == "a"
        assert result.class_scores["a"] == pytest.approx(1 - 0.5 / 4)

    def test_cosine_metric(self):
        """Cosine scoring is available as an alternative"""
        store = train([("a", enc("1100")), ("b", enc("0011"))])
        assert classify(enc("1000"), store, metric="cosine").label == "a"

    def test_errors(self):
        """Empty stores, unknown options and wrong sizes are rejected"""
        store = train([("a", enc("1100"))])
        with pytest.raises(TemplateStoreError):
            classify(enc("1100"), TemplateStore())
        with pytest.raises(RecognizerError):
            classify(enc("1100"), store, metric="euclid")
        with pytest.raises(RecognizerError):
            classify(enc("1100"), store, match="knn")
        with pytest.raises(RecognizerError):
            classify(enc("110"), store)

    def test_resubstitution(self):
        """Every training encoding is recognized as its own class"""
        store = train(toy_encodings())
        for label, encoded in toy_encodings():
            result = classify(encoded, store)
            assert result.label == label
            assert result.score == 1.0

    def test_concurrent_first_classify(self):
        """Threads classifying against a fresh store all get the same answer"""
        examples = toy_encodings()
        query = examples[0][1]
        expected = classify(query, train(examples))

        def first_calls(store, barrier):
            barrier.wait()
            return classify(query, store)

        for _ in range(50):
            store = train(examples)
            barrier = threading.Barrier(4)
            with ThreadPoolExecutor(max_workers=4) as pool:
                futures = [pool.submit(first_calls, store, barrier) for _ in range(4)]
                results = [f.result() for f in futures]
            assert all(r == expected for r in results)

    def test_bit_matrix_published_whole(self):
        """Repeated calls share one cached (matrix, owners) pair; add() resets it"""
        store = train([("a", enc("1100")), ("b", enc("0011"))])
        first = store.bit_matrix()
        assert store.bit_matrix() is first
        assert first[0].shape == (2, 4)
        assert first[1].tolist() == [0, 1]
        store.add("a", enc("1111"))
        matrix, owners = store.bit_matrix()
        assert matrix.shape == (3, 4)
        assert owners.tolist() == [0, 0, 1]


class TestStorePersistence:
    """Test saving and loading template stores"""

    def provenance(self, examples):
        return make_provenance(examples[0][1].tiling, examples[0][1].dims, "rule", "mean", 42)

    def test_round_trip_reproduces_matches(self, tmp_path):
        """train, persist, load, classify gives identical results"""
        examples = toy_encodings(10)
        store = train(examples, self.provenance(examples))
        loaded = load_store(save_store(store, tmp_path / "store"))

        assert loaded.labels == store.labels
        assert len(loaded) == 10
        queries = toy_encodings(10, seed=7)
        for _, query in queries + examples:
            before: MatchResult = classify(query, store)
            after: MatchResult = classify(query, loaded)
            assert before == after
            assert classify(query, store, match="class_mean") == classify(query, loaded, match="class_mean")

    def test_templates_bit_exact(self, tmp_path):
        """Bits and activations come back unchanged"""
        examples = toy_encodings(4)
        store = train(examples, self.provenance(examples))
        loaded = load_store(save_store(store, tmp_path / "store"))
        for label in store.labels:
            for original, restored in zip(store.templates(label), loaded.templates(label)):
                assert original.same_bits(restored)

    def test_saves_are_byte_identical(self, tmp_path):
        """Re-saving writes the same bytes"""
        examples = toy_encodings(6)
        store = train(examples, self.provenance(examples))
        first = save_store(store, tmp_path / "a")
        second = save_store(store, tmp_path / "b")
        files_a = sorted(p.relative_to(first) for p in first.rglob("*") if p.is_file())
        files_b = sorted(p.relative_to(second) for p in second.rglob("*") if p.is_file())
        assert files_a == files_b
        for rel in files_a:
            assert (first / rel).read_bytes() == (second / rel).read_bytes()

    def test_manifest_contents(self, tmp_path):
        """Provenance and class list are recorded"""
        examples = toy_encodings(4)
        store = train(examples, self.provenance(examples))
        directory = save_store(store, tmp_path / "store")
        manifest = json.loads((directory / "manifest.json").read_text())
        assert manifest["format_version"] == 1
        assert manifest["provenance"]["seed"] == 42
        assert manifest["provenance"]["dims"] == [16, 16]
        assert [c["label"] for c in manifest["classes"]] == ["s1", "s2"]
        assert manifest["classes"][0]["templates"][0] == "templates/0000.htsp"

    def test_resave_removes_stale_templates(self, tmp_path):
        """Saving a smaller store over a larger one leaves no leftovers"""
        directory = tmp_path / "store"
        big = toy_encodings(6)
        save_store(train(big, self.provenance(big)), directory)
        small = toy_encodings(2)
        save_store(train(small, self.provenance(small)), directory)
        assert len(list((directory / "templates").glob("*.htsp"))) == 2

    def test_missing_manifest(self, tmp_path):
        """A directory without a manifest is not a store"""
        with pytest.raises(TemplateStoreError, match="manifest"):
            load_store(tmp_path)

    def test_invalid_manifest(self, tmp_path):
        """Manifests are schema checked"""
        (tmp_path / "manifest.json").write_text(json.dumps({"format_version": 1}))
        with pytest.raises(TemplateStoreError):
            load_store(tmp_path)

    def test_missing_template_file(self, tmp_path):
        """Missing template files are named"""
        examples = toy_encodings(2)
        directory = save_store(train(examples, self.provenance(examples)), tmp_path / "store")
        (directory / "templates" / "0001.htsp").unlink()
        with pytest.raises(TemplateStoreError, match="0001.htsp"):
            load_store(directory)
