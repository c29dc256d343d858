#!/usr/bin/env python3
"""Benchmark the compiled pooling kernels against the pure-Python fallback.

Builds a synthetic corpus (vocabulary matrix plus token-index segments) and
times the two kernel entry points on both backends.  Run after installing
the package:

    python benchmarks/bench_kernels.py
    python benchmarks/bench_kernels.py --sentences 50000 --dim 300
"""

import argparse
import time

import numpy as np

from embeval.kernels import pool_py

try:
    from embeval.kernels import _pool
except ImportError:
    _pool = None


def synthetic_corpus(n_sentences, vocab, dim, mean_len, seed=0):
    rng = np.random.default_rng(seed)
    matrix = rng.normal(size=(vocab, dim))
    lengths = rng.poisson(mean_len, size=n_sentences).clip(1)
    indices = rng.integers(0, vocab, size=int(lengths.sum())).astype(np.int64)
    offsets = np.zeros(n_sentences + 1, dtype=np.int64)
    offsets[1:] = np.cumsum(lengths)
    weights = rng.uniform(0.1, 1.0, size=indices.size)
    return matrix, indices, offsets, weights


def best_of(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sentences", type=int, default=20000)
    ap.add_argument("--vocab", type=int, default=50000)
    ap.add_argument("--dim", type=int, default=300)
    ap.add_argument("--mean-len", type=int, default=12)
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()

    matrix, indices, offsets, weights = synthetic_corpus(
        args.sentences, args.vocab, args.dim, args.mean_len
    )
    print(
        f"corpus: {args.sentences} sentences, {indices.size} tokens, "
        f"vocab {args.vocab} x dim {args.dim}"
    )

    cases = {
        "pool min+avg+max": lambda impl: impl.pool_segments(
            matrix, indices, offsets, True, True, True
        ),
        "pool avg only": lambda impl: impl.pool_segments(
            matrix, indices, offsets, False, True, False
        ),
        "weighted average": lambda impl: impl.weighted_average_segments(
            matrix, indices, weights, offsets
        ),
    }

    header = f"{'kernel':<20} {'python':>10} {'compiled':>10} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for name, call in cases.items():
        t_py = best_of(lambda: call(pool_py), args.repeats)
        if _pool is None:
            print(f"{name:<20} {t_py * 1e3:>8.1f}ms {'n/a':>10} {'n/a':>8}")
            continue
        t_cy = best_of(lambda: call(_pool), args.repeats)
        out_py = call(pool_py)
        out_cy = call(_pool)
        for a, b in zip(out_py, out_cy):
            if a is not None:
                np.testing.assert_allclose(a, b, atol=1e-12)
        print(f"{name:<20} {t_py * 1e3:>8.1f}ms {t_cy * 1e3:>8.1f}ms {t_py / t_cy:>7.1f}x")
    if _pool is None:
        print("compiled backend not built; only the fallback was timed")


if __name__ == "__main__":
    main()
