"""Statistical primitives: correlations, MSE, cosine, and dispersion summaries.

Zero-variance inputs to the correlation functions raise
DegenerateSeriesError instead of returning NaN or 0, so downstream reports
can never average in garbage.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import DegenerateSeriesError, ZeroVectorError


def _series(x, name: str) -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    return arr


def pearson(x, y) -> float:
    """Product-moment correlation of two equal-length series (n >= 2)."""
    xa, ya = _series(x, "x"), _series(y, "y")
    if xa.shape != ya.shape or xa.size < 2:
        raise ValueError("series must have equal length >= 2")
    xc = xa - xa.mean()
    yc = ya - ya.mean()
    sx = float(np.sqrt(np.sum(xc * xc)))
    sy = float(np.sqrt(np.sum(yc * yc)))
    if sx == 0.0:
        raise DegenerateSeriesError("first series has zero variance")
    if sy == 0.0:
        raise DegenerateSeriesError("second series has zero variance")
    return float(np.sum(xc * yc) / (sx * sy))


def average_ranks(x) -> np.ndarray:
    """1-based ranks; tied values all receive the average of their positions."""
    a = _series(x, "x")
    order = np.argsort(a, kind="mergesort")
    ranks = np.empty(a.size, dtype=np.float64)
    i = 0
    while i < a.size:
        j = i
        while j + 1 < a.size and a[order[j + 1]] == a[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def spearman(x, y) -> float:
    """Rank correlation: pearson applied to average-rank transforms."""
    xa, ya = _series(x, "x"), _series(y, "y")
    if xa.shape != ya.shape or xa.size < 2:
        raise ValueError("series must have equal length >= 2")
    return pearson(average_ranks(xa), average_ranks(ya))


def mse(pred, gold) -> float:
    """Mean of squared differences (n >= 1)."""
    p, g = _series(pred, "pred"), _series(gold, "gold")
    if p.shape != g.shape or p.size < 1:
        raise ValueError("series must have equal length >= 1")
    diff = p - g
    return float(np.mean(diff * diff))


def cosine(u, v) -> float:
    """u.v / (|u||v|); a zero vector on either side is an error."""
    ua = np.asarray(u, dtype=np.float64)
    va = np.asarray(v, dtype=np.float64)
    if ua.shape != va.shape or ua.ndim != 1:
        raise ValueError("vectors must be one-dimensional with equal length")
    nu = float(np.linalg.norm(ua))
    nv = float(np.linalg.norm(va))
    if nu == 0.0 or nv == 0.0:
        raise ZeroVectorError("undefined cosine: zero vector")
    return float(np.dot(ua, va) / (nu * nv))


class DispersionSummary(NamedTuple):
    range: float
    std: float


def dispersion(values) -> DispersionSummary:
    """Spread of a score collection: max - min and the population std (n >= 2)."""
    a = _series(values, "values")
    if a.size < 2:
        raise ValueError("need at least 2 values")
    return DispersionSummary(range=float(a.max() - a.min()), std=float(a.std()))
