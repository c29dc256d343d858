"""Sentence encoders built from word vectors, with explicit output-size control.

All encoders are immutable after construction.  Encoders that need a fitting
pass (currently the frequency-weighted one, whose common component is
estimated from training data) implement prepared(), which returns a new
fitted instance and leaves the original untouched.

Out-of-vocabulary tokens are skipped during pooling; a sentence whose tokens
are all out of vocabulary encodes to the zero vector and is flagged in the
batch diagnostics rather than silently imputed.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from . import kernels
from .corpus import Sentence
from .errors import DegenerateMatrixError, EvaluationError, LoadError
from .wordvec import WordVectors

log = logging.getLogger(__name__)

POOL_OPS = ("min", "avg", "max")

DEFAULT_SIF_A = 1e-3
DEFAULT_FREQ_FLOOR = 1e-7


@dataclass
class EncodeDiagnostics:
    """Counters surfaced in run reports."""

    n_sentences: int
    n_tokens: int = 0
    n_oov_tokens: int = 0
    empty_indices: tuple[int, ...] = ()

    @property
    def n_empty(self) -> int:
        return len(self.empty_indices)


class Encoder:
    """Base encoder: a named map from sentences to vectors of output_dim."""

    name: str
    output_dim: int

    def encode_batch(
        self, sentences: Sequence[Sentence], ids: Optional[Sequence[int]] = None
    ) -> tuple[np.ndarray, EncodeDiagnostics]:
        raise NotImplementedError

    def encode(self, sentence: Sentence) -> np.ndarray:
        matrix, _ = self.encode_batch([sentence])
        return matrix[0]

    def prepared(self, sentences: Sequence[Sentence]) -> "Encoder":
        """Return an instance fitted on the given sentences (default: self)."""
        return self


def _segments(wv: WordVectors, sentences: Sequence[Sentence]):
    """Flatten sentences into (row indices, offsets, token count) for the kernels."""
    chunks = []
    offsets = np.zeros(len(sentences) + 1, dtype=np.int64)
    n_tokens = 0
    for i, s in enumerate(sentences):
        rows = wv.indices(s.tokens)
        chunks.append(rows)
        offsets[i + 1] = offsets[i] + rows.size
        n_tokens += len(s.tokens)
    indices = np.concatenate(chunks) if chunks else np.zeros(0, dtype=np.int64)
    return indices, offsets, n_tokens


def _diagnostics(n_tokens: int, offsets: np.ndarray, empty: np.ndarray) -> EncodeDiagnostics:
    return EncodeDiagnostics(
        n_sentences=offsets.shape[0] - 1,
        n_tokens=n_tokens,
        n_oov_tokens=n_tokens - int(offsets[-1]),
        empty_indices=tuple(int(i) for i in np.flatnonzero(empty)),
    )


class AverageEncoder(Encoder):
    """Uniform average of in-vocabulary word vectors."""

    def __init__(self, wv: WordVectors, name: Optional[str] = None):
        self.wv = wv
        self.name = name or f"avg-{wv.name}"
        self.output_dim = wv.dim

    def encode_batch(self, sentences, ids=None):
        indices, offsets, n_tokens = _segments(self.wv, sentences)
        _, avg, _, empty = kernels.pool_segments(self.wv.matrix, indices, offsets, do_avg=True)
        return avg, _diagnostics(n_tokens, offsets, empty)


class PoolConcatEncoder(Encoder):
    """Concatenation of elementwise pooling ops, in the fixed order min, avg, max."""

    def __init__(self, wv: WordVectors, ops: Sequence[str], name: Optional[str] = None):
        ops = tuple(ops)
        if not ops:
            raise ValueError("ops must be non-empty")
        bad = sorted(set(ops) - set(POOL_OPS))
        if bad:
            raise ValueError(f"unknown pooling ops {bad}; choose from {POOL_OPS}")
        self.wv = wv
        self.ops = tuple(op for op in POOL_OPS if op in ops)
        self.name = name or f"{'-'.join(self.ops)}-{wv.name}"
        self.output_dim = len(self.ops) * wv.dim

    def encode_batch(self, sentences, ids=None):
        indices, offsets, n_tokens = _segments(self.wv, sentences)
        mins, avgs, maxs, empty = kernels.pool_segments(
            self.wv.matrix,
            indices,
            offsets,
            do_min="min" in self.ops,
            do_avg="avg" in self.ops,
            do_max="max" in self.ops,
        )
        blocks = {"min": mins, "avg": avgs, "max": maxs}
        out = np.hstack([blocks[op] for op in self.ops])
        return out, _diagnostics(n_tokens, offsets, empty)


@dataclass(frozen=True)
class SifModel:
    """Smoothing constant, word frequencies, and the fitted common component."""

    a: float = DEFAULT_SIF_A
    freq: dict[str, float] = None  # type: ignore[assignment]
    pc: Optional[np.ndarray] = None
    floor: float = DEFAULT_FREQ_FLOOR

    def __post_init__(self):
        if self.a <= 0:
            raise ValueError("smoothing constant must be positive")
        if self.freq is None:
            object.__setattr__(self, "freq", {})
        for word, f in self.freq.items():
            if not 0.0 < f <= 1.0:
                raise ValueError(f"frequency of {word!r} outside (0, 1]: {f}")
        if self.pc is not None and abs(np.linalg.norm(self.pc) - 1.0) > 1e-8:
            raise ValueError("fitted component must have unit length")


def load_frequencies(path: Union[str, Path]) -> dict[str, float]:
    """Load "word count" lines and convert counts to relative frequencies.

    Repeated words accumulate.  Values that are already relative frequencies
    work too, since dividing by the total is then a no-op up to scale.
    """
    path = Path(path)
    counts: dict[str, float] = {}
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            parts = line.split()
            if not parts:
                continue
            if len(parts) != 2:
                raise LoadError(f"{path}:{lineno}: expected 'word count'")
            try:
                value = float(parts[1])
            except ValueError:
                raise LoadError(f"{path}:{lineno}: non-numeric count {parts[1]!r}") from None
            if value <= 0:
                raise LoadError(f"{path}:{lineno}: count must be positive")
            counts[parts[0]] = counts.get(parts[0], 0.0) + value
    if not counts:
        raise LoadError(f"{path}: no frequencies loaded")
    total = sum(counts.values())
    return {w: c / total for w, c in counts.items()}


def sif_weights(model: SifModel, sentence: Sentence) -> np.ndarray:
    """Per-token weights a / (a + freq(token)); missing words get the floor frequency."""
    a = model.a
    return np.array(
        [a / (a + model.freq.get(tok, model.floor)) for tok in sentence.tokens],
        dtype=np.float64,
    )


def sif_fit_pc(
    embeddings: np.ndarray, tol: float = 1e-9, max_iter: int = 1000
) -> np.ndarray:
    """First right singular vector of a (non-centered) embedding matrix.

    Power iteration on X^T X via matrix-vector products; stops when the unit
    iterate moves by at most tol, or after max_iter rounds.  The sign is
    fixed so the largest-magnitude entry is positive.  Under an exactly
    degenerate (tied) spectrum the returned direction is the first one the
    iteration settles on.
    """
    X = np.asarray(embeddings, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] < 2:
        raise ValueError("need a matrix with at least 2 rows")
    if not np.any(X):
        raise DegenerateMatrixError("degenerate PC: all-zero embedding matrix")
    rng = np.random.Generator(np.random.PCG64(0))
    v = rng.normal(size=X.shape[1])
    v /= np.linalg.norm(v)
    for _ in range(max_iter):
        w = X.T @ (X @ v)
        norm = np.linalg.norm(w)
        if norm == 0.0:
            # started in the null space; re-draw
            v = rng.normal(size=X.shape[1])
            v /= np.linalg.norm(v)
            continue
        w /= norm
        delta = np.linalg.norm(w - v)
        v = w
        if delta <= tol:
            break
    if v[np.argmax(np.abs(v))] < 0:
        v = -v
    return v


def sif_remove_pc(pc: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Remove the component along the unit vector pc: v - (pc.v) pc.

    Accepts a single vector or a matrix of row vectors.
    """
    pc = np.asarray(pc, dtype=np.float64)
    if abs(np.linalg.norm(pc) - 1.0) > 1e-6:
        raise ValueError("pc must have unit length")
    v = np.asarray(v, dtype=np.float64)
    if v.ndim == 1:
        return v - (v @ pc) * pc
    return v - np.outer(v @ pc, pc)


class SifEncoder(Encoder):
    """Frequency-weighted average with removal of the fitted common component.

    prepared() fits the component on the weighted averages of the supplied
    sentences and returns a new encoder; encoding without a fitted component
    is an error unless remove_component=False.
    """

    def __init__(
        self,
        wv: WordVectors,
        model: SifModel,
        remove_component: bool = True,
        name: Optional[str] = None,
    ):
        self.wv = wv
        self.model = model
        self.remove_component = remove_component
        self.name = name or f"sif-{wv.name}"
        self.output_dim = wv.dim

    def _weighted_batch(self, sentences):
        indices, offsets, n_tokens = _segments(self.wv, sentences)
        weights = np.empty(indices.shape[0], dtype=np.float64)
        pos = 0
        for s in sentences:
            for tok in s.tokens:
                if tok in self.wv.vocab:
                    weights[pos] = self.model.a / (
                        self.model.a + self.model.freq.get(tok, self.model.floor)
                    )
                    pos += 1
        out, empty = kernels.weighted_average_segments(self.wv.matrix, indices, weights, offsets)
        return out, _diagnostics(n_tokens, offsets, empty)

    def prepared(self, sentences):
        if not self.remove_component:
            return self
        weighted, _ = self._weighted_batch(sentences)
        pc = sif_fit_pc(weighted)
        return SifEncoder(
            self.wv,
            replace(self.model, pc=pc),
            remove_component=True,
            name=self.name,
        )

    def encode_batch(self, sentences, ids=None):
        out, diag = self._weighted_batch(sentences)
        if self.remove_component:
            if self.model.pc is None:
                raise RuntimeError(
                    f"encoder {self.name!r}: common component not fitted; call prepared()"
                )
            out = sif_remove_pc(self.model.pc, out)
        return out, diag


class RandomProjectionEncoder(Encoder):
    """Averages word vectors mapped through a fixed seeded Gaussian projection.

    Projection entries are i.i.d. normal with mean 0 and standard deviation
    1/sqrt(d), drawn once from the seed.  Since the projection is linear it
    is applied to the pooled average rather than per token.
    """

    def __init__(
        self,
        wv: WordVectors,
        target_dim: int,
        seed: int,
        projection: Optional[np.ndarray] = None,
        name: Optional[str] = None,
    ):
        if target_dim < 1:
            raise ValueError("target_dim must be positive")
        self.wv = wv
        self.seed = seed
        self.output_dim = int(target_dim)
        self.name = name or f"proj{target_dim}-{wv.name}"
        if projection is None:
            projection = projection_matrix(seed, target_dim, wv.dim)
        elif projection.shape != (target_dim, wv.dim):
            raise ValueError("projection shape must be (target_dim, d)")
        self.projection = projection

    def encode_batch(self, sentences, ids=None):
        indices, offsets, n_tokens = _segments(self.wv, sentences)
        _, avg, _, empty = kernels.pool_segments(self.wv.matrix, indices, offsets, do_avg=True)
        return avg @ self.projection.T, _diagnostics(n_tokens, offsets, empty)


def projection_matrix(seed: int, target_dim: int, d: int) -> np.ndarray:
    """The fixed (target_dim, d) Gaussian projection for a seed; same seed, same matrix."""
    rng = np.random.Generator(np.random.PCG64(seed))
    return rng.normal(0.0, 1.0 / np.sqrt(d), size=(target_dim, d))


class ConcatEncoder(Encoder):
    """Ordered concatenation of member encoders; output size is the sum of theirs."""

    def __init__(self, parts: Sequence[Encoder], name: Optional[str] = None):
        if not parts:
            raise ValueError("parts must be non-empty")
        self.parts = tuple(parts)
        self.name = name or "+".join(p.name for p in self.parts)
        self.output_dim = sum(p.output_dim for p in self.parts)

    def prepared(self, sentences):
        return ConcatEncoder([p.prepared(sentences) for p in self.parts], name=self.name)

    def encode_batch(self, sentences, ids=None):
        blocks = []
        diags = []
        for p in self.parts:
            out, diag = p.encode_batch(sentences, ids=ids)
            blocks.append(out)
            diags.append(diag)
        # a concatenated row is all-zero only where every part was empty
        empty: set[int] = set(diags[0].empty_indices)
        for diag in diags[1:]:
            empty &= set(diag.empty_indices)
        merged = EncodeDiagnostics(
            n_sentences=len(sentences),
            n_tokens=max(diag.n_tokens for diag in diags),
            n_oov_tokens=max(diag.n_oov_tokens for diag in diags),
            empty_indices=tuple(sorted(empty)),
        )
        return np.hstack(blocks), merged


def concat_encoders(parts: Sequence[Encoder], name: Optional[str] = None) -> ConcatEncoder:
    return ConcatEncoder(parts, name=name)


class PrecomputedEncoder(Encoder):
    """Serves stored sentence vectors, looked up by dataset sentence id.

    File format: "id<TAB>v1 v2 ... vD" per line, ids matching the dataset's
    sentence numbering (see PairDataset.sentence_ids / example order for
    labeled data).
    """

    def __init__(self, path: Union[str, Path], name: Optional[str] = None):
        path = Path(path)
        table: dict[int, int] = {}
        rows: list[np.ndarray] = []
        dim = None
        with path.open(encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.rstrip("\n")
                if not line:
                    continue
                sid_str, sep, rest = line.partition("\t")
                if not sep:
                    raise LoadError(f"{path}:{lineno}: expected 'id<TAB>components'")
                try:
                    sid = int(sid_str)
                    vec = np.array(rest.split(), dtype=np.float64)
                except ValueError:
                    raise LoadError(f"{path}:{lineno}: unparseable row") from None
                if dim is None:
                    dim = vec.size
                    if dim == 0:
                        raise LoadError(f"{path}:{lineno}: no vector components")
                elif vec.size != dim:
                    raise LoadError(
                        f"{path}:{lineno}: expected {dim} components, got {vec.size}"
                    )
                if not np.all(np.isfinite(vec)):
                    raise LoadError(f"{path}:{lineno}: non-finite vector component")
                if sid in table:
                    raise LoadError(f"{path}:{lineno}: duplicate sentence id {sid}")
                table[sid] = len(rows)
                rows.append(vec)
        if not rows:
            raise LoadError(f"{path}: no vectors loaded")
        self.name = name or path.stem
        self.output_dim = int(dim)
        self._table = table
        self._matrix = np.vstack(rows)

    def encode(self, sentence):
        raise EvaluationError(
            f"precomputed encoder {self.name!r} needs sentence ids; use encode_batch"
        )

    def encode_batch(self, sentences, ids=None):
        if ids is None:
            raise EvaluationError(
                f"precomputed encoder {self.name!r} needs sentence ids; none supplied"
            )
        ids = list(ids)
        if len(ids) != len(sentences):
            raise EvaluationError("ids must align with sentences")
        picks = np.empty(len(ids), dtype=np.int64)
        for i, sid in enumerate(ids):
            row = self._table.get(int(sid))
            if row is None:
                raise EvaluationError(
                    f"precomputed encoder {self.name!r} has no vector for sentence id {sid}"
                )
            picks[i] = row
        return self._matrix[picks], EncodeDiagnostics(n_sentences=len(ids))


def load_precomputed(path: Union[str, Path], name: Optional[str] = None) -> PrecomputedEncoder:
    return PrecomputedEncoder(path, name=name)


def encode_average(wv: WordVectors, sentence: Sentence) -> np.ndarray:
    """Mean of in-vocabulary token vectors; zero vector if all tokens are OOV."""
    return AverageEncoder(wv).encode(sentence)


def encode_pool_concat(wv: WordVectors, sentence: Sentence, ops: Sequence[str]) -> np.ndarray:
    """Concatenated per-op pooling over the sentence's in-vocabulary vectors."""
    return PoolConcatEncoder(wv, ops).encode(sentence)


def encode_random_projection(
    wv: WordVectors, sentence: Sentence, target_dim: int, seed: int
) -> np.ndarray:
    """Seeded Gaussian enlargement of the averaged word vectors."""
    return RandomProjectionEncoder(wv, target_dim, seed).encode(sentence)
