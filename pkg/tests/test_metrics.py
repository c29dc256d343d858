import itertools
import math

import numpy as np
import pytest

from embeval.errors import DegenerateSeriesError, ZeroVectorError
from embeval.metrics import average_ranks, cosine, dispersion, mse, pearson, spearman

# Anscombe's canonical quartet
ANSCOMBE_X = [10.0, 8.0, 13.0, 9.0, 11.0, 14.0, 6.0, 4.0, 12.0, 7.0, 5.0]
ANSCOMBE = [
    (ANSCOMBE_X, [8.04, 6.95, 7.58, 8.81, 8.33, 9.96, 7.24, 4.26, 10.84, 4.82, 5.68]),
    (ANSCOMBE_X, [9.14, 8.14, 8.74, 8.77, 9.26, 8.10, 6.13, 3.10, 9.13, 7.26, 4.74]),
    (ANSCOMBE_X, [7.46, 6.77, 12.74, 7.11, 7.81, 8.84, 6.08, 5.39, 8.15, 6.42, 5.73]),
    (
        [8.0, 8.0, 8.0, 8.0, 8.0, 8.0, 8.0, 19.0, 8.0, 8.0, 8.0],
        [6.58, 5.76, 7.71, 8.84, 8.47, 7.04, 5.25, 12.50, 5.56, 7.91, 6.89],
    ),
]


def oracle_pearson(x, y):
    """Loop-based product-moment correlation, independent of numpy paths."""
    n = len(x)
    mx = sum(x) / n
    my = sum(y) / n
    sxy = sum((a - mx) * (b - my) for a, b in zip(x, y))
    sxx = sum((a - mx) ** 2 for a in x)
    syy = sum((b - my) ** 2 for b in y)
    return sxy / math.sqrt(sxx * syy)


def oracle_ranks(x):
    """O(n^2) counting ranks with average ties."""
    return [
        1.0 + sum(1 for b in x if b < a) + (sum(1 for b in x if b == a) - 1) / 2.0 for a in x
    ]


def oracle_spearman(x, y):
    return oracle_pearson(oracle_ranks(x), oracle_ranks(y))


class TestPearson:
    def test_identity(self):
        x = [1.0, 2.0, 5.0, 3.0]
        assert pearson(x, x) == pytest.approx(1.0, abs=1e-12)

    def test_anticorrelation(self):
        x = np.array([1.0, 2.0, 5.0, 3.0])
        assert pearson(x, -x) == pytest.approx(-1.0, abs=1e-12)

    @pytest.mark.parametrize("x,y", ANSCOMBE)
    def test_anscombe_quartet(self, x, y):
        assert pearson(x, y) == pytest.approx(0.816, abs=1e-3)
        assert pearson(x, y) == pytest.approx(oracle_pearson(x, y), abs=1e-12)

    def test_zero_variance_errors(self):
        with pytest.raises(DegenerateSeriesError, match="first"):
            pearson([1.0, 1.0, 1.0], [1.0, 2.0, 3.0])
        with pytest.raises(DegenerateSeriesError, match="second"):
            pearson([1.0, 2.0, 3.0], [4.0, 4.0, 4.0])

    def test_affine_invariance(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            x = rng.normal(size=15)
            y = rng.normal(size=15)
            a, b, c, d = rng.uniform(-3, 3, size=4)
            a = a if abs(a) > 0.1 else 1.0
            c = c if abs(c) > 0.1 else -1.0
            r0 = pearson(x, y)
            r1 = pearson(a * x + b, c * y + d)
            assert abs(r1 - np.sign(a * c) * r0) <= 1e-10

    def test_bounded_on_random_inputs(self):
        rng = np.random.default_rng(1)
        for _ in range(200):
            x = rng.normal(size=rng.integers(2, 30))
            y = rng.normal(size=x.size)
            assert abs(pearson(x, y)) <= 1.0 + 1e-12
            assert abs(spearman(x, y)) <= 1.0 + 1e-12

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            pearson([1.0, 2.0], [1.0, 2.0, 3.0])

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError):
            pearson([1.0, float("nan"), 2.0], [1.0, 2.0, 3.0])


class TestSpearman:
    def test_monotone_transform_gives_one(self):
        x = np.array([0.3, 1.7, 2.0, 5.2, 9.9])
        for g in (np.exp, np.cbrt, lambda v: 3 * v + 1):
            assert spearman(x, g(x)) == pytest.approx(1.0, abs=1e-12)

    def test_hand_example(self):
        assert spearman([1.0, 2.0, 3.0], [3.0, 1.0, 2.0]) == pytest.approx(-0.5, abs=1e-12)

    def test_ties_average_ranks(self):
        assert spearman([1.0, 1.0, 2.0], [5.0, 5.0, 9.0]) == pytest.approx(1.0, abs=1e-12)

    def test_all_equal_errors(self):
        with pytest.raises(DegenerateSeriesError):
            spearman([2.0, 2.0, 2.0], [1.0, 2.0, 3.0])

    def test_rank_transform_matches_counting_oracle_exhaustively(self):
        # all series of length <= 6 over the alphabet {0, 1, 2}
        for n in range(1, 7):
            for series in itertools.product((0.0, 1.0, 2.0), repeat=n):
                got = average_ranks(np.array(series))
                np.testing.assert_allclose(got, oracle_ranks(series), atol=1e-12)

    def test_matches_bruteforce_oracle_on_all_short_pairs(self):
        # full correlation equivalence for every non-constant pair up to length 4
        for n in (2, 3, 4):
            space = [s for s in itertools.product((0.0, 1.0, 2.0), repeat=n) if len(set(s)) > 1]
            for x in space:
                for y in space:
                    assert spearman(x, y) == pytest.approx(oracle_spearman(x, y), abs=1e-12)

    def test_matches_bruteforce_oracle_sampled_longer(self):
        rng = np.random.default_rng(2)
        for n in (5, 6):
            for _ in range(300):
                x = rng.integers(0, 3, size=n).astype(float)
                y = rng.integers(0, 3, size=n).astype(float)
                if len(set(x)) == 1 or len(set(y)) == 1:
                    continue
                assert spearman(x, y) == pytest.approx(oracle_spearman(x, y), abs=1e-12)


class TestMse:
    def test_identity(self):
        assert mse([1.0, 2.0], [1.0, 2.0]) == 0.0

    def test_constant_offset(self):
        g = np.array([1.0, 4.0, -2.0])
        assert mse(g + 1.0, g) == pytest.approx(1.0, abs=1e-12)

    def test_hand_arithmetic(self):
        assert mse([0.0, 0.0], [1.0, 2.0]) == pytest.approx(2.5, abs=1e-12)

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            mse([1.0], [1.0, 2.0])


class TestCosine:
    def test_identity(self):
        u = np.array([1.0, 2.0, 3.0])
        assert cosine(u, u) == pytest.approx(1.0, abs=1e-12)

    def test_orthogonal(self):
        assert cosine([1.0, 0.0], [0.0, 5.0]) == pytest.approx(0.0, abs=1e-12)

    def test_scale_invariance(self):
        rng = np.random.default_rng(3)
        u = rng.normal(size=6)
        v = rng.normal(size=6)
        assert cosine(2.5 * u, 0.3 * v) == pytest.approx(cosine(u, v), abs=1e-12)

    def test_zero_vector_errors(self):
        with pytest.raises(ZeroVectorError, match="undefined cosine"):
            cosine([0.0, 0.0], [1.0, 2.0])


class TestDispersion:
    STANDARD = [0.41, 0.56, 0.56, 0.67, 0.66, 0.67, 0.70, 0.67, 0.64]
    NORMALIZED = [0.62, 0.65, 0.67, 0.67, 0.67, 0.67, 0.70, 0.71, 0.66]

    def test_standard_column(self):
        r = dispersion(self.STANDARD)
        assert r.range == pytest.approx(0.29, abs=1e-12)
        assert r.std == pytest.approx(0.086, abs=1e-3)

    def test_normalized_column(self):
        r = dispersion(self.NORMALIZED)
        assert r.range == pytest.approx(0.09, abs=1e-12)
        assert r.std == pytest.approx(0.024, abs=1e-3)

    def test_constant_series(self):
        r = dispersion([3.0, 3.0, 3.0])
        assert r.range == 0.0 and r.std == 0.0

    def test_population_convention(self):
        # the sample (n-1) convention would give ~0.0915 on the standard
        # column and miss the reported 8.6%
        assert dispersion(self.STANDARD).std < 0.09
