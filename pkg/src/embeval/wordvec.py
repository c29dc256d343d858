"""Loading and serving pretrained word vectors from whitespace text files."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Union

import numpy as np

from .errors import LoadError

log = logging.getLogger(__name__)


@dataclass
class WordVectors:
    """An immutable vocabulary-indexed dense matrix, one row per word."""

    name: str
    dim: int
    vocab: dict[str, int]
    matrix: np.ndarray  # (V, dim) float64
    duplicate_count: int = 0

    def __len__(self) -> int:
        return len(self.vocab)

    def lookup(self, token: str) -> Optional[np.ndarray]:
        """Return the stored vector, or None for out-of-vocabulary tokens."""
        row = self.vocab.get(token)
        if row is None:
            return None
        return self.matrix[row]

    def indices(self, tokens: Iterable[str]) -> np.ndarray:
        """Row indices of the in-vocabulary tokens, in sentence order."""
        vocab = self.vocab
        return np.array(
            [row for row in (vocab.get(t) for t in tokens) if row is not None],
            dtype=np.int64,
        )


def load_word_vectors(
    path: Union[str, Path],
    expected_dim: Optional[int] = None,
    name: Optional[str] = None,
) -> WordVectors:
    """Load "word v1 v2 ... vd" lines; an optional "count dim" header is detected.

    The dimension is inferred from the first data line (or checked against
    expected_dim).  Duplicate words keep their first occurrence; the number
    dropped is logged and recorded.  Inconsistent dimensions or non-finite
    values abort the load with the offending line number.
    """
    path = Path(path)
    vocab: dict[str, int] = {}
    rows: list[np.ndarray] = []
    dim = expected_dim
    duplicates = 0
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            parts = line.rstrip("\n").split(" ")
            if parts and parts[-1] == "":
                parts = parts[:-1]
            if not parts or parts == [""]:
                continue
            if lineno == 1 and len(parts) == 2 and _is_int(parts[0]) and _is_int(parts[1]):
                header_dim = int(parts[1])
                if expected_dim is not None and header_dim != expected_dim:
                    raise LoadError(
                        f"{path}:1: header dimension {header_dim} != expected {expected_dim}"
                    )
                dim = header_dim
                continue
            word, values = parts[0], parts[1:]
            if dim is None:
                dim = len(values)
                if dim == 0:
                    raise LoadError(f"{path}:{lineno}: no vector components")
            if len(values) != dim:
                raise LoadError(
                    f"{path}:{lineno}: expected {dim} components, got {len(values)}"
                )
            try:
                vec = np.array(values, dtype=np.float64)
            except ValueError:
                raise LoadError(f"{path}:{lineno}: unparseable vector component") from None
            if not np.all(np.isfinite(vec)):
                raise LoadError(f"{path}:{lineno}: non-finite vector component")
            if word in vocab:
                duplicates += 1
                continue
            vocab[word] = len(rows)
            rows.append(vec)
    if not rows:
        raise LoadError(f"{path}: no vectors loaded")
    if duplicates:
        log.warning("%s: dropped %d duplicate words (first occurrence kept)", path, duplicates)
    return WordVectors(
        name=name or path.stem,
        dim=int(dim),
        vocab=vocab,
        matrix=np.vstack(rows),
        duplicate_count=duplicates,
    )


def lookup(wv: WordVectors, token: str) -> Optional[np.ndarray]:
    """Functional alias for WordVectors.lookup."""
    return wv.lookup(token)


def _is_int(s: str) -> bool:
    try:
        int(s)
    except ValueError:
        return False
    return True
