import numpy as np
import pytest

from embeval.corpus import (
    CrossValidation,
    DatasetManifest,
    FixedSplit,
    cv_folds,
    load_labeled_dataset,
    load_pair_dataset,
    load_sts_benchmark,
    tokenize,
)
from embeval.errors import LoadError

STS_LINE = (
    "main-captions\tMSRvid\t2012\t1\t5.000\t"
    "A plane is taking off.\tAn air plane is taking off."
)


class TestTokenize:
    def test_basic(self):
        assert tokenize("The cat sat.").tokens == ("the", "cat", "sat")

    def test_empty(self):
        assert tokenize("").tokens == ()

    def test_whitespace_collapse(self):
        assert tokenize("  A  B ").tokens == ("a", "b")

    def test_surrounding_punctuation(self):
        assert tokenize('"Hello," she said!').tokens == ("hello", "she", "said")

    def test_inner_punctuation_kept(self):
        assert tokenize("don't re-enter").tokens == ("don't", "re-enter")

    def test_pure_punctuation_chunk_kept(self):
        assert tokenize("!!!").tokens == ("!!!",)

    def test_nonempty_for_any_non_whitespace(self):
        for raw in ["x", "...", " - ", "a.", "0"]:
            assert tokenize(raw).tokens, raw

    def test_idempotent_on_rejoined_tokens(self):
        for raw in ["The cat sat.", "don't stop!!", "a-b 'c' (d)", "!!! ok"]:
            once = tokenize(raw).tokens
            assert tokenize(" ".join(once)).tokens == once

    def test_deterministic(self):
        assert tokenize("Some Text Here.") == tokenize("Some Text Here.")


class TestStsLoader:
    def test_canonical_line(self, tmp_path):
        f = tmp_path / "sts-test.csv"
        f.write_text(STS_LINE + "\n", encoding="utf-8")
        pairs = load_sts_benchmark(f, "test")
        assert len(pairs) == 1
        assert pairs[0].gold == 5.0
        assert pairs[0].a.tokens == ("a", "plane", "is", "taking", "off")
        assert pairs[0].b.tokens[:2] == ("an", "air")

    def test_six_fields_fails_with_line_number(self, tmp_path):
        f = tmp_path / "bad.csv"
        f.write_text(STS_LINE + "\n" + "a\tb\t2012\t1\t3.0\tonly one sentence\n")
        with pytest.raises(LoadError, match=":2"):
            load_sts_benchmark(f, "test")

    def test_extra_trailing_fields_accepted(self, tmp_path):
        # published dev/test files carry optional source columns
        f = tmp_path / "sts.csv"
        f.write_text(STS_LINE + "\textra\turl\n")
        assert load_sts_benchmark(f, "test")[0].gold == 5.0

    def test_score_stored_exactly(self, tmp_path):
        f = tmp_path / "sts.csv"
        f.write_text("g\tf\t2012\t1\t2.6\ts one\ts two\n")
        assert load_sts_benchmark(f, "train")[0].gold == 2.6

    def test_score_out_of_range(self, tmp_path):
        f = tmp_path / "sts.csv"
        f.write_text("g\tf\t2012\t1\t5.5\ts one\ts two\n")
        with pytest.raises(LoadError, match="outside"):
            load_sts_benchmark(f, "train")

    def test_non_numeric_score(self, tmp_path):
        f = tmp_path / "sts.csv"
        f.write_text("g\tf\t2012\t1\thigh\ts one\ts two\n")
        with pytest.raises(LoadError, match="non-numeric"):
            load_sts_benchmark(f, "train")

    def test_unknown_split_rejected(self, tmp_path):
        with pytest.raises(ValueError):
            load_sts_benchmark(tmp_path / "x", "validation")

    def test_reload_identical(self, tmp_path):
        f = tmp_path / "sts.csv"
        f.write_text(STS_LINE + "\n" + "g\tf\t2013\t2\t2.6\tx y\tz w\n")
        assert load_sts_benchmark(f, "test") == load_sts_benchmark(f, "test")

    def test_pair_dataset_sentence_ids(self, tmp_path):
        for split in ("train", "dev", "test"):
            (tmp_path / f"{split}.csv").write_text(
                "".join(f"g\tf\t2012\t{i}\t1.0\ts {i}\tt {i}\n" for i in range(3))
            )
        ds = load_pair_dataset(
            tmp_path / "train.csv", tmp_path / "dev.csv", tmp_path / "test.csv"
        )
        ids_a, ids_b = ds.sentence_ids("train")
        assert ids_a.tolist() == [0, 2, 4] and ids_b.tolist() == [1, 3, 5]
        ids_a, ids_b = ds.sentence_ids("test")
        assert ids_a.tolist() == [12, 14, 16] and ids_b.tolist() == [13, 15, 17]


class TestLabeledLoader:
    def test_minimal(self, tmp_path):
        f = tmp_path / "toy.tsv"
        f.write_text("0\tgood movie\n1\tbad movie\n")
        manifest = DatasetManifest(n_classes=2, policy=CrossValidation(k=2, seed=0))
        ds = load_labeled_dataset(f, manifest)
        assert len(ds.examples) == 2
        assert ds.examples[0][0].tokens == ("good", "movie")
        assert ds.labels().tolist() == [0, 1]

    def test_label_out_of_range(self, tmp_path):
        f = tmp_path / "toy.tsv"
        f.write_text("5\tx\n")
        with pytest.raises(LoadError, match="label 5"):
            load_labeled_dataset(f, DatasetManifest(2, CrossValidation(2)))

    def test_empty_file(self, tmp_path):
        f = tmp_path / "toy.tsv"
        f.write_text("")
        with pytest.raises(LoadError, match="empty"):
            load_labeled_dataset(f, DatasetManifest(2, CrossValidation(2)))

    def test_missing_tab(self, tmp_path):
        f = tmp_path / "toy.tsv"
        f.write_text("0 no tab here\n")
        with pytest.raises(LoadError):
            load_labeled_dataset(f, DatasetManifest(2, CrossValidation(2)))

    def test_fixed_split_overlap_rejected(self, tmp_path):
        f = tmp_path / "toy.tsv"
        f.write_text("0\ta\n1\tb\n0\tc\n")
        policy = FixedSplit(train_indices=(0, 1), test_indices=(1, 2))
        with pytest.raises(LoadError, match="overlap"):
            load_labeled_dataset(f, DatasetManifest(2, policy))

    def test_reload_identical(self, tmp_path):
        f = tmp_path / "toy.tsv"
        f.write_text("0\tgood\n1\tbad\n0\tfine\n")
        manifest = DatasetManifest(2, CrossValidation(3, seed=1))
        a = load_labeled_dataset(f, manifest)
        b = load_labeled_dataset(f, manifest)
        assert a.examples == b.examples


class TestCvFolds:
    def test_ten_examples_ten_folds(self):
        folds = cv_folds(10, 10, seed=0)
        assert all(f.size == 1 for f in folds)

    @pytest.mark.parametrize("n,k,seed", [(10, 3, 0), (23, 10, 7), (100, 10, 42), (5, 2, 3)])
    def test_partition_properties(self, n, k, seed):
        folds = cv_folds(n, k, seed)
        union = np.concatenate(folds)
        assert sorted(union.tolist()) == list(range(n))
        assert sum(f.size for f in folds) == n
        sizes = [f.size for f in folds]
        assert max(sizes) - min(sizes) <= 1

    def test_pure_function_of_inputs(self):
        a = cv_folds(50, 7, seed=9)
        b = cv_folds(50, 7, seed=9)
        assert all(np.array_equal(x, y) for x, y in zip(a, b))
        c = cv_folds(50, 7, seed=10)
        assert any(not np.array_equal(x, y) for x, y in zip(a, c))

    def test_bad_k(self):
        with pytest.raises(ValueError):
            cv_folds(5, 1, 0)
        with pytest.raises(ValueError):
            cv_folds(5, 6, 0)
