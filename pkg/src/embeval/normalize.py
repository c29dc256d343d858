"""Column z-normalization followed by row unit-length scaling.

Normalization is a binary hyperparameter of every evaluation: statistics are
estimated on training data and applied unchanged elsewhere, except in the
unsupervised setting where no split exists and the whole evaluated matrix is
both fitted and transformed.  The standard deviation is the population one
(divide by N); the choice is frozen so reruns are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class NormStats:
    """Per-column mean/std plus the split they were estimated on."""

    mean: np.ndarray
    std: np.ndarray
    degenerate: tuple[int, ...]  # columns with zero variance
    fitted_on: str

    @property
    def dim(self) -> int:
        return self.mean.shape[0]


def fit_znorm(X: np.ndarray, fitted_on: str = "train") -> NormStats:
    """Column means and population standard deviations of an N x D matrix (N >= 2)."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] < 2:
        raise ValueError("need at least 2 rows to estimate normalization")
    mean = X.mean(axis=0)
    std = X.std(axis=0)  # population (divide by N)
    degenerate = tuple(int(j) for j in np.flatnonzero(std == 0.0))
    return NormStats(mean=mean, std=std, degenerate=degenerate, fitted_on=fitted_on)


def apply_znorm(stats: NormStats, X: np.ndarray) -> tuple[np.ndarray, tuple[int, ...]]:
    """Center/scale columns with the given stats, then rescale rows to unit length.

    Zero-variance columns divide by 1.  Rows that are all zero after
    centering stay zero; their indices are returned alongside the matrix.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != stats.dim:
        raise ValueError(
            f"matrix has {X.shape[1] if X.ndim == 2 else '?'} columns, stats have {stats.dim}"
        )
    divisor = np.where(stats.std == 0.0, 1.0, stats.std)
    out = (X - stats.mean) / divisor
    norms = np.linalg.norm(out, axis=1)
    zero_rows = tuple(int(i) for i in np.flatnonzero(norms == 0.0))
    scale = np.where(norms == 0.0, 1.0, norms)
    out /= scale[:, None]
    return out, zero_rows


def normalize_ucp(X_all: np.ndarray) -> tuple[np.ndarray, NormStats, tuple[int, ...]]:
    """Fit and apply on the same stacked matrix (the unsupervised setting).

    Not idempotent: the row rescaling breaks the column centering, so a
    second application changes the matrix again.
    """
    stats = fit_znorm(X_all, fitted_on="all")
    divisor = np.where(stats.std == 0.0, 1.0, stats.std)
    centered = (np.asarray(X_all, dtype=np.float64) - stats.mean) / divisor
    col_means = centered.mean(axis=0)
    assert np.all(np.abs(col_means) <= 1e-9), "centering failed"
    out, zero_rows = apply_znorm(stats, X_all)
    return out, stats, zero_rows
