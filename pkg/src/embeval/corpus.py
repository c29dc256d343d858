"""Dataset ingestion: tokenization, sentence-pair and labeled-sentence loaders.

Every encoder in a comparison must see identical tokens, so the tokenizer is
frozen: lowercase, split on whitespace, strip surrounding ASCII punctuation.
A chunk that consists only of punctuation is kept verbatim (still lowercased)
so that any raw text with a non-whitespace character yields at least one token.
"""

from __future__ import annotations

import string
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np

from .errors import LoadError

_PUNCT = string.punctuation

PAIR_SPLITS = ("train", "dev", "test")


@dataclass(frozen=True)
class Sentence:
    """A tokenized sentence plus the raw text it came from."""

    tokens: tuple[str, ...]
    raw: str


def tokenize(raw: str) -> Sentence:
    """Tokenize text with the frozen rule; total (never raises)."""
    tokens = []
    for chunk in raw.lower().split():
        stripped = chunk.strip(_PUNCT)
        tokens.append(stripped if stripped else chunk)
    return Sentence(tokens=tuple(tokens), raw=raw)


@dataclass(frozen=True)
class Pair:
    """Two sentences with a human similarity judgment in [0, 5]."""

    a: Sentence
    b: Sentence
    gold: float


@dataclass
class PairDataset:
    """Sentence-pair splits in the STSBenchmark style."""

    train: list[Pair]
    dev: list[Pair]
    test: list[Pair]
    name: str = "pairs"

    def split(self, name: str) -> list[Pair]:
        if name not in PAIR_SPLITS:
            raise KeyError(f"unknown split {name!r}")
        return getattr(self, name)

    def sentence_ids(self, name: str) -> tuple[np.ndarray, np.ndarray]:
        """Global sentence ids for a split's (a, b) sides.

        Sentences are numbered across the whole dataset in split order
        train, dev, test; within a split pair i contributes ids
        (base + 2i, base + 2i + 1).  Precomputed-embedding files use this
        numbering.
        """
        base = 0
        for earlier in PAIR_SPLITS:
            if earlier == name:
                break
            base += 2 * len(self.split(earlier))
        n = len(self.split(name))
        ids = base + 2 * np.arange(n, dtype=np.int64)
        return ids, ids + 1


def load_sts_benchmark(path: Union[str, Path], split: str) -> list[Pair]:
    """Load one STSBenchmark split from its tab-separated file.

    The published layout has 7 fields per line (genre, file, year, index,
    score, sentence1, sentence2); dev/test lines sometimes append extra
    source fields, which are ignored.  Fewer than 7 fields, a non-numeric
    score, or a score outside [0, 5] is an error naming the line.
    """
    if split not in PAIR_SPLITS:
        raise ValueError(f"unknown split {split!r}")
    path = Path(path)
    pairs = []
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) < 7:
                raise LoadError(
                    f"{path}:{lineno}: expected 7 tab-separated fields, got {len(fields)}"
                )
            try:
                gold = float(fields[4])
            except ValueError:
                raise LoadError(f"{path}:{lineno}: non-numeric score {fields[4]!r}") from None
            if not 0.0 <= gold <= 5.0:
                raise LoadError(f"{path}:{lineno}: score {gold} outside [0, 5]")
            pairs.append(Pair(a=tokenize(fields[5]), b=tokenize(fields[6]), gold=gold))
    if not pairs:
        raise LoadError(f"{path}: empty {split} split")
    return pairs


def load_pair_dataset(
    train: Union[str, Path],
    dev: Union[str, Path],
    test: Union[str, Path],
    name: str = "pairs",
) -> PairDataset:
    """Assemble a PairDataset from the three per-split STSBenchmark files."""
    return PairDataset(
        train=load_sts_benchmark(train, "train"),
        dev=load_sts_benchmark(dev, "dev"),
        test=load_sts_benchmark(test, "test"),
        name=name,
    )


@dataclass(frozen=True)
class FixedSplit:
    """Disjoint train/test index sets into the example list."""

    train_indices: tuple[int, ...]
    test_indices: tuple[int, ...]


@dataclass(frozen=True)
class CrossValidation:
    """k-fold cross-validation; fold assignment is a pure function of (n, k, seed)."""

    k: int
    seed: int = 0


SplitPolicy = Union[FixedSplit, CrossValidation]


@dataclass(frozen=True)
class DatasetManifest:
    """Declares how a labeled file is to be interpreted."""

    n_classes: int
    policy: SplitPolicy


@dataclass
class LabeledDataset:
    """Sentences with categorical labels and a split policy."""

    examples: list[tuple[Sentence, int]]
    n_classes: int
    policy: SplitPolicy
    name: str = "labeled"

    def sentences(self) -> list[Sentence]:
        return [s for s, _ in self.examples]

    def labels(self) -> np.ndarray:
        return np.array([y for _, y in self.examples], dtype=np.int64)


def cv_folds(n: int, k: int, seed: int) -> list[np.ndarray]:
    """Partition indices 0..n-1 into k folds whose sizes differ by at most 1.

    Deterministic given (n, k, seed); independent of any global RNG state.
    """
    if not 2 <= k <= n:
        raise ValueError(f"need 2 <= k <= n, got k={k}, n={n}")
    perm = np.random.Generator(np.random.PCG64(seed)).permutation(n)
    return [np.sort(perm[i::k]) for i in range(k)]


def load_labeled_dataset(
    path: Union[str, Path], manifest: DatasetManifest, name: str = "labeled"
) -> LabeledDataset:
    """Load a unified "label<TAB>text" file under the given manifest."""
    path = Path(path)
    examples: list[tuple[Sentence, int]] = []
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            label_str, sep, text = line.partition("\t")
            if not sep:
                raise LoadError(f"{path}:{lineno}: expected 'label<TAB>text'")
            try:
                label = int(label_str)
            except ValueError:
                raise LoadError(f"{path}:{lineno}: non-integer label {label_str!r}") from None
            if not 0 <= label < manifest.n_classes:
                raise LoadError(
                    f"{path}:{lineno}: label {label} outside [0, {manifest.n_classes})"
                )
            examples.append((tokenize(text), label))
    if not examples:
        raise LoadError(f"{path}: empty dataset")
    _check_policy(manifest.policy, len(examples), path)
    return LabeledDataset(
        examples=examples, n_classes=manifest.n_classes, policy=manifest.policy, name=name
    )


def _check_policy(policy: SplitPolicy, n: int, path: Path) -> None:
    if isinstance(policy, FixedSplit):
        train, test = set(policy.train_indices), set(policy.test_indices)
        if train & test:
            raise LoadError(f"{path}: fixed split train/test sets overlap")
        out = [i for i in train | test if not 0 <= i < n]
        if out:
            raise LoadError(f"{path}: split index {min(out)} outside [0, {n})")
        if not train or not test:
            raise LoadError(f"{path}: fixed split needs non-empty train and test")
    elif isinstance(policy, CrossValidation):
        if not 2 <= policy.k <= n:
            raise LoadError(f"{path}: cannot make {policy.k} folds from {n} examples")
    else:  # pragma: no cover - type guard
        raise TypeError(f"unknown split policy {policy!r}")
